/** Boots the real HTTP service on an ephemeral port for the test suite. */
import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";

export const FIXTURE = fileURLToPath(new URL("./fixtures/toy.json", import.meta.url));

export interface RunningServer {
  baseUrl: string;
  stop(): Promise<void>;
}

export async function startServer(fixture: string = FIXTURE): Promise<RunningServer> {
  const proc: ChildProcess = spawn(
    "python3",
    ["-m", "ontoplot.cli", "serve", fixture, "--port", "0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  let stderr = "";
  proc.stderr!.on("data", (chunk) => (stderr += String(chunk)));

  const baseUrl = await new Promise<string>((resolve, reject) => {
    let out = "";
    const timer = setTimeout(
      () => reject(new Error(`server did not announce a port; stderr: ${stderr}`)),
      15000,
    );
    proc.stdout!.on("data", (chunk) => {
      out += String(chunk);
      const m = /serving on (http:\/\/[^\s]+)/.exec(out);
      if (m) {
        clearTimeout(timer);
        resolve(m[1]!);
      }
    });
    proc.once("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early with code ${code}; stderr: ${stderr}`));
    });
  });

  return {
    baseUrl,
    stop: () =>
      new Promise<void>((resolve) => {
        if (proc.exitCode !== null) {
          resolve();
          return;
        }
        proc.once("exit", () => resolve());
        proc.kill("SIGTERM");
        setTimeout(() => proc.kill("SIGKILL"), 2000).unref();
      }),
  };
}
