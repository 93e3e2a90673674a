"""Ontology association explorer: parse, query, compress, lay out, serve."""

from .compress import (
    CHAIN,
    COLLAPSE,
    EXPAND,
    SQUARE_MERGE,
    SUBTREE,
    CompressedRegion,
    CompressionPlan,
    InterestModel,
    apply_overrides,
    detect_collapsible,
    mark_focus_interest,
    mark_interest,
)
from .errors import (
    CycleError,
    EmptyOntologyError,
    FormatError,
    InconsistentPlanError,
    NoCommonAncestorError,
    OntoplotError,
    OwlSyntaxError,
    RootCollapseError,
    UnknownClassError,
    UnknownOccurrenceError,
    UnknownPropertyError,
)
from .hierarchy import (
    SYNTHETIC_ROOT_ID,
    SYNTHETIC_ROOT_LABEL,
    ClassEffectReport,
    OccurrenceNode,
    OccurrenceTree,
    QueryEngine,
    build_occurrence_tree,
)
from .layout import (
    Box,
    Glyph,
    Label,
    Layout,
    LayoutConfig,
    LayoutDiff,
    LayoutFragment,
    Legend,
    Moved,
    Resized,
    SelectionMark,
    Separator,
    ViewState,
    apply_layout_diff,
    build_legend,
    compute_layout,
    compute_layout_diff,
    diff_layouts,
    diff_to_wire,
    hit_test,
    layout_for_view,
    layout_to_wire,
    legend_to_wire,
)
from .model import (
    Association,
    ClassRef,
    ObjectPropertyRef,
    OntologySnapshot,
    Provenance,
    SubclassEdge,
    SummaryStats,
    build_snapshot,
    local_name,
    read_native_document,
    summarize,
    write_native_document,
)
from .owl import load_owl, parse_functional_syntax, snapshot_from_report
from .server import OntologyService, encode_response, make_server, search, serve, summary_to_wire
from .svg import render_svg

__version__ = "0.1.0"
