import { ApiClient } from "./api.js";
import { buildConnections, buildParts, type TaskFile } from "./layout.js";
import {
  emptyState,
  gameReducer,
  isClickable,
  resolveFeedback,
  results,
} from "./reducer.js";
import type { GameState, Mode } from "./types.js";

const api = new ApiClient("");
let state: GameState = emptyState;
let sessionId: string | null = null;
let busy = false;

const $ = (id: string) => document.getElementById(id)!;

function dispatch(event: Parameters<typeof gameReducer>[1]): void {
  state = gameReducer(state, event);
  render();
}

async function startGame(): Promise<void> {
  const mode = ($("mode") as HTMLSelectElement).value as Mode;
  const modelId = ($("model") as HTMLInputElement).value.trim();
  try {
    const task: TaskFile = await api.getTask(modelId);
    const parts = buildParts(task);
    const connections = buildConnections(task, parts);
    dispatch({ type: "START", mode, parts, connections, now: Date.now() });
    sessionId = null;
    if (mode === "assisted") {
      const created = await api.createSession(modelId);
      sessionId = created.session_id;
      dispatch({ type: "PREDICTION", tokens: created.initial_prediction });
    }
    $("banner").textContent = "";
  } catch (err) {
    $("banner").textContent = `could not start: ${err instanceof Error ? err.message : err}`;
  }
}

async function clickConnection(connectionId: string): Promise<void> {
  if (busy || !isClickable(state, connectionId)) return;
  busy = true;
  try {
    const feedback = resolveFeedback(state);
    if (sessionId !== null && state.pendingPrediction === null) {
      // the player fetched parts herself: tell the engine what she used
      await api.postFeedback(sessionId, false, feedback.actual);
    }
    dispatch({ type: "CLICK_CONNECTION", connectionId });
    if (sessionId !== null) {
      const reply = await api.postPrimary(sessionId, connectionId);
      dispatch({ type: "PREDICTION", tokens: reply.prediction });
    }
    if (state.connections.every((c) => c.done)) {
      dispatch({ type: "FINISH", now: Date.now() });
    }
  } finally {
    busy = false;
  }
}

function render(): void {
  const storage = $("storage");
  storage.replaceChildren(
    ...Object.values(state.parts)
      .filter((p) => p.location === "storage")
      .sort((a, b) => a.id.localeCompare(b.id))
      .map((p) => {
        const b = document.createElement("button");
        b.textContent = p.id;
        b.className = `part ${p.type}`;
        b.onclick = () => dispatch({ type: "FETCH_PART", partId: p.id });
        return b;
      }),
  );
  const workcell = $("workcell");
  workcell.replaceChildren(
    ...Object.values(state.parts)
      .filter((p) => p.location !== "storage")
      .sort((a, b) => a.id.localeCompare(b.id))
      .map((p) => {
        const s = document.createElement("span");
        s.textContent = p.location === "staged" ? `${p.id} (robot)` : p.id;
        s.className = `part ${p.type} ${p.location}`;
        return s;
      }),
  );
  const grid = $("connections");
  grid.replaceChildren(
    ...state.connections.map((c) => {
      const b = document.createElement("button");
      b.textContent = c.id.replace(/^conn_/, "");
      b.className = `conn ${c.group}${c.done ? " done" : ""}`;
      b.disabled = !isClickable(state, c.id);
      b.onclick = () => void clickConnection(c.id);
      return b;
    }),
  );
  $("stats").textContent =
    `fetch clicks: ${state.fetchClicks} | accepted ` +
    `${state.predictionsAccepted}/${state.predictionsOffered} predictions`;
  if (state.finished) {
    const r = results(state);
    const rate = r.predictionsOffered
      ? Math.round((100 * r.predictionsAccepted) / r.predictionsOffered)
      : 0;
    $("results").textContent =
      `done in ${(r.elapsedMs / 1000).toFixed(1)}s with ${r.fetchClicks} manual ` +
      `fetches (${r.mode}); prediction acceptance ${rate}%`;
  } else {
    $("results").textContent = "";
  }
}

window.setInterval(() => {
  if (state.startedAt !== null && !state.finished) {
    dispatch({ type: "TICK", now: Date.now() });
    $("timer").textContent = `${(state.elapsedMs / 1000).toFixed(0)}s`;
  }
}, 500);

$("start").addEventListener("click", () => void startGame());
render();
