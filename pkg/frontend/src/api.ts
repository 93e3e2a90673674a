/** Thin fetch client for the ontoplot service. All geometry comes from here. */
import type {
  ClassCard,
  DiffWire,
  LayoutWire,
  LegendWire,
  PropertyRow,
  SearchHit,
  SummaryWire,
  ViewStateWire,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export interface LayoutResponse {
  layout: LayoutWire;
  legend: LegendWire;
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async requestText(method: string, path: string, body?: unknown): Promise<string> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await fetch(this.baseUrl + path, init);
    const text = await resp.text();
    if (!resp.ok) {
      let code = "HttpError";
      let message = text;
      try {
        const payload = JSON.parse(text);
        code = payload.code ?? code;
        message = payload.error ?? message;
      } catch {
        // non-JSON error body, keep raw text
      }
      throw new ApiError(resp.status, code, message);
    }
    return text;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    return JSON.parse(await this.requestText(method, path, body)) as T;
  }

  summary(): Promise<SummaryWire> {
    return this.request("GET", "/summary");
  }

  properties(): Promise<PropertyRow[]> {
    return this.request("GET", "/properties");
  }

  classCard(classId: string): Promise<ClassCard> {
    return this.request("GET", "/class/" + encodeURIComponent(classId));
  }

  search(q: string, property?: string): Promise<SearchHit[]> {
    let path = "/search?q=" + encodeURIComponent(q);
    if (property) path += "&property=" + encodeURIComponent(property);
    return this.request("GET", path);
  }

  query(subcommand: string, params: Record<string, string>): Promise<Record<string, unknown>> {
    const qs = new URLSearchParams(params).toString();
    return this.request("GET", "/query/" + encodeURIComponent(subcommand) + (qs ? "?" + qs : ""));
  }

  layout(view: ViewStateWire): Promise<LayoutResponse> {
    return this.request("POST", "/layout", { viewState: view });
  }

  /** Raw response body, for byte-level scene comparisons. */
  layoutText(view: ViewStateWire): Promise<string> {
    return this.requestText("POST", "/layout", { viewState: view });
  }

  async layoutDiff(prev: ViewStateWire, next: ViewStateWire): Promise<DiffWire> {
    const resp = await this.request<{ diff: DiffWire }>("POST", "/layout-diff", {
      prevViewState: prev,
      nextViewState: next,
    });
    return resp.diff;
  }
}

/**
 * Serializes async work: at most one request in flight, later calls queue
 * behind it in submission order.
 */
export class RequestGate {
  private tail: Promise<unknown> = Promise.resolve();

  run<T>(fn: () => Promise<T>): Promise<T> {
    const next = this.tail.then(fn, fn);
    this.tail = next.catch(() => undefined);
    return next;
  }
}
