// End-to-end acceptance: a scripted player with a dominant preference plays
// the assembly game against the real inference service, assisted vs
// unassisted. Needs the prefstack Python package installed (PREFSTACK_PYTHON
// overrides the interpreter).
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { playGame } from "../src/bot.js";
import { DemonstrationSchema } from "../src/schema.js";
import type { TaskFile } from "../src/layout.js";

const PYTHON = process.env.PREFSTACK_PYTHON ?? "python3";
const MODEL_ID = "m-fig4";
const HOOK_TIMEOUT = 180_000;
const TEST_TIMEOUT = 120_000;

let workDir: string;
let server: ChildProcess | null = null;
let baseUrl: string;
let api: ApiClient;
let task: TaskFile;

async function waitForServer(url: string, ms: number): Promise<void> {
  const deadline = Date.now() + ms;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${url}/v1/models/${MODEL_ID}`);
      if (r.ok) return;
      lastError = new Error(`status ${r.status}`);
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error(`service did not come up: ${lastError}`);
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "prefstack-game-"));
  execFileSync(PYTHON, ["-m", "prefstack", "gen", "--out", workDir, "--seed", "7"]);
  execFileSync(PYTHON, [
    "-m", "prefstack", "train",
    "--task", join(workDir, "task.json"),
    "--demos", join(workDir, "demos"),
    "--out", join(workDir, `${MODEL_ID}.json`),
    "--seed", "7",
  ]);
  const port = 20000 + Math.floor(Math.random() * 20000);
  baseUrl = `http://127.0.0.1:${port}`;
  server = spawn(
    PYTHON,
    ["-m", "prefstack", "serve", "--model-dir", workDir, "--addr", `127.0.0.1:${port}`],
    { stdio: "ignore" },
  );
  await waitForServer(baseUrl, HOOK_TIMEOUT - 30_000);
  api = new ApiClient(baseUrl);
  task = await api.getTask(MODEL_ID);
}, HOOK_TIMEOUT);

afterAll(() => {
  server?.kill();
  if (workDir) rmSync(workDir, { recursive: true, force: true });
});

describe("bot-driven game", () => {
  it(
    "assisted play needs at most half the manual fetch clicks of unassisted",
    async () => {
      const unassisted = await playGame({ mode: "unassisted", task });
      const assisted = await playGame({
        mode: "assisted",
        task,
        api,
        modelId: MODEL_ID,
        seed: 11,
        userId: "bot",
      });
      expect(unassisted.results.fetchClicks).toBe(17); // every part fetched by hand
      expect(assisted.results.fetchClicks).toBeLessThanOrEqual(
        unassisted.results.fetchClicks / 2,
      );
      expect(assisted.results.predictionsAccepted).toBeGreaterThan(0);
    },
    TEST_TIMEOUT,
  );

  it(
    "assisted network trace is one primary post and at most one feedback post per move",
    async () => {
      const assisted = await playGame({ mode: "assisted", task, api, modelId: MODEL_ID, seed: 3 });
      expect(assisted.moves).toHaveLength(32);
      for (const move of assisted.moves) {
        expect(move.primaryPosts).toBe(1);
        expect(move.feedbackPosts).toBeLessThanOrEqual(1);
      }
    },
    TEST_TIMEOUT,
  );

  it(
    "both modes emit demonstrations that validate against the schema",
    async () => {
      const unassisted = await playGame({ mode: "unassisted", task, userId: "solo" });
      const assisted = await playGame({
        mode: "assisted",
        task,
        api,
        modelId: MODEL_ID,
        seed: 5,
        userId: "helped",
      });
      for (const outcome of [unassisted, assisted]) {
        const demo = DemonstrationSchema.parse(outcome.demonstration);
        expect(demo.actions.filter((a) => a.kind === "primary")).toHaveLength(32);
        expect(demo.actions.filter((a) => a.kind === "secondary")).toHaveLength(17);
      }
    },
    TEST_TIMEOUT,
  );

  it(
    "the server transcript matches the bot's acceptance accounting",
    async () => {
      const assisted = await playGame({ mode: "assisted", task, api, modelId: MODEL_ID, seed: 9 });
      const transcript = await api.getSession(assisted.sessionId!);
      expect(transcript.step).toBe(32);
      const resolved = transcript.transcript.filter((r) => r.accepted !== null);
      expect(resolved).toHaveLength(32);
      const acceptedServerSide = resolved.filter((r) => r.accepted === true).length;
      expect(acceptedServerSide).toBe(assisted.results.predictionsAccepted);
    },
    TEST_TIMEOUT,
  );
});
