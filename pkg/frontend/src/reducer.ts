import type { GameEvent, GameResults, GameState, PartInstance } from "./types.js";

/** Timer increments are capped so a stalled network cannot inflate times. */
const MAX_TICK_MS = 2000;

export const emptyState: GameState = {
  mode: "unassisted",
  parts: {},
  connections: [],
  pendingPrediction: null,
  stagedParts: [],
  fetchedThisMove: [],
  fetchClicks: 0,
  predictionsOffered: 0,
  predictionsAccepted: 0,
  actionLog: [],
  startedAt: null,
  lastTickAt: null,
  elapsedMs: 0,
  finished: false,
};

export function isClickable(state: GameState, connectionId: string): boolean {
  const conn = state.connections.find((c) => c.id === connectionId);
  if (!conn || conn.done || state.finished) return false;
  return conn.requires.every((pid) => {
    const part = state.parts[pid];
    return part !== undefined && part.location !== "storage";
  });
}

/** Lowest-id storage instance of the part type named by a supply token. */
export function instanceForToken(parts: Record<string, PartInstance>, token: string): string | null {
  const type = token.replace(/^bring:/, "");
  const candidates = Object.values(parts)
    .filter((p) => p.type === type && p.location === "storage")
    .map((p) => p.id)
    .sort();
  return candidates[0] ?? null;
}

function movePart(state: GameState, partId: string, location: PartInstance["location"]): GameState {
  const part = state.parts[partId];
  if (!part) return state;
  return { ...state, parts: { ...state.parts, [partId]: { ...part, location } } };
}

/** Fetching from storage is the rejection gesture: staged parts go back first. */
function unstage(state: GameState): GameState {
  let next = state;
  for (const pid of state.stagedParts) next = movePart(next, pid, "storage");
  return { ...next, stagedParts: [], pendingPrediction: null };
}

export function gameReducer(state: GameState, event: GameEvent): GameState {
  switch (event.type) {
    case "START": {
      const parts: GameState["parts"] = {};
      for (const p of event.parts) parts[p.id] = { ...p, location: "storage" };
      return {
        ...emptyState,
        mode: event.mode,
        parts,
        connections: event.connections.map((c) => ({ ...c, done: false })),
        startedAt: event.now,
        lastTickAt: event.now,
      };
    }

    case "PREDICTION": {
      if (state.finished) return state;
      let next: GameState = {
        ...unstage(state),
        pendingPrediction: event.tokens,
        predictionsOffered: state.predictionsOffered + 1,
      };
      for (const token of event.tokens) {
        const pid = instanceForToken(next.parts, token);
        if (pid === null) continue; // nothing left of that type to supply
        next = movePart(next, pid, "staged");
        next = { ...next, stagedParts: [...next.stagedParts, pid] };
      }
      return next;
    }

    case "REJECT_PREDICTION": {
      if (state.pendingPrediction === null) return state;
      return unstage(state);
    }

    case "FETCH_PART": {
      if (state.finished) return state;
      const next = state.pendingPrediction !== null ? unstage(state) : state;
      const part = next.parts[event.partId];
      if (!part || part.location !== "storage") return state;
      const moved = movePart(next, event.partId, "workcell");
      return {
        ...moved,
        fetchClicks: moved.fetchClicks + 1,
        fetchedThisMove: [...moved.fetchedThisMove, event.partId],
        actionLog: [...moved.actionLog, { id: `bring_${event.partId}`, kind: "secondary" }],
      };
    }

    case "CLICK_CONNECTION": {
      if (!isClickable(state, event.connectionId)) return state;
      let next = state;
      if (state.pendingPrediction !== null) {
        // untouched prediction: the supplied parts are used as offered
        for (const pid of state.stagedParts) {
          next = movePart(next, pid, "workcell");
          next = {
            ...next,
            actionLog: [...next.actionLog, { id: `bring_${pid}`, kind: "secondary" }],
          };
        }
        next = { ...next, predictionsAccepted: next.predictionsAccepted + 1 };
      }
      return {
        ...next,
        pendingPrediction: null,
        stagedParts: [],
        fetchedThisMove: [],
        connections: next.connections.map((c) =>
          c.id === event.connectionId ? { ...c, done: true } : c,
        ),
        actionLog: [...next.actionLog, { id: event.connectionId, kind: "primary" }],
      };
    }

    case "TICK": {
      if (state.finished || state.lastTickAt === null) return state;
      const delta = Math.max(0, event.now - state.lastTickAt);
      return {
        ...state,
        elapsedMs: state.elapsedMs + Math.min(delta, MAX_TICK_MS),
        lastTickAt: event.now,
      };
    }

    case "FINISH": {
      if (state.finished) return state;
      const ticked = gameReducer(state, { type: "TICK", now: event.now });
      return { ...ticked, finished: true };
    }
  }
}

/** How the move resolves against the API, read just before the connection click. */
export function resolveFeedback(state: GameState): { accepted: boolean; actual: string[] } {
  const accepted = state.pendingPrediction !== null;
  const types = new Set(
    state.fetchedThisMove.map((pid) => {
      const part = state.parts[pid];
      return `bring:${part ? part.type : "unknown"}`;
    }),
  );
  return { accepted, actual: [...types].sort() };
}

export function results(state: GameState): GameResults {
  return {
    mode: state.mode,
    elapsedMs: state.elapsedMs,
    fetchClicks: state.fetchClicks,
    predictionsOffered: state.predictionsOffered,
    predictionsAccepted: state.predictionsAccepted,
  };
}

export function exportDemonstration(state: GameState, userId: string) {
  return {
    schema_version: 1,
    user_id: userId,
    actions: state.actionLog,
  };
}
