/** Spawn the query service once for the whole test run. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import type { GlobalSetupContext } from "vitest/node";

const CONFIG = resolve(__dirname, "../../fixtures/fedlog.toml");

const BOOT = `
import pathlib, sys
import uvicorn
from fedlog.engine import EngineConfig, QueryEngine
from fedlog.service import create_app

config = EngineConfig.load(pathlib.Path(sys.argv[1]))
engine = QueryEngine.from_config(config, run_dir=pathlib.Path(sys.argv[2]))
uvicorn.run(create_app(engine), host="127.0.0.1", port=int(sys.argv[3]),
            log_level="warning")
`;

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("could not determine a free port"));
        return;
      }
      probe.close(() => resolvePort(address.port));
    });
  });
}

async function waitForHealth(url: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${url}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service at ${url} never became healthy`);
}

export default async function setup({ provide }: GlobalSetupContext) {
  const port = await freePort();
  const runDir = mkdtempSync(join(tmpdir(), "fedlog-ui-"));
  const child = spawn(
    "python3",
    ["-c", BOOT, CONFIG, runDir, String(port)],
    { stdio: ["ignore", "inherit", "inherit"] },
  );
  const url = `http://127.0.0.1:${port}`;
  await waitForHealth(url, child);
  provide("apiUrl", url);
  return () => {
    child.kill("SIGTERM");
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    apiUrl: string;
  }
}
