import { ApiClient } from "./api.js";
import { buildConnections, buildParts, oneSidePlan, type TaskFile } from "./layout.js";
import { emptyState, exportDemonstration, gameReducer, isClickable, results } from "./reducer.js";
import type { GameResults, GameState, Mode } from "./types.js";

export interface MoveTrace {
  connectionId: string;
  feedbackPosts: number;
  primaryPosts: number;
}

export interface GameOutcome {
  results: GameResults;
  demonstration: ReturnType<typeof exportDemonstration>;
  sessionId: string | null;
  moves: MoveTrace[];
  finalState: GameState;
}

export interface PlayOptions {
  mode: Mode;
  task: TaskFile;
  api?: ApiClient;
  modelId?: string;
  seed?: number;
  userId?: string;
  now?: () => number;
}

/** A scripted player with a fixed dominant preference.

 * The plan is frames, then brackets, then shelves one side first; before
 * each connection the bot compares the robot's staged supply with the part
 * types it actually needs, accepting matches and otherwise rejecting and
 * fetching from storage itself.
 */
export async function playGame(opts: PlayOptions): Promise<GameOutcome> {
  const now = opts.now ?? Date.now;
  const parts = buildParts(opts.task);
  const connections = buildConnections(opts.task, parts);
  const plan = oneSidePlan(connections);
  let state = gameReducer(emptyState, {
    type: "START",
    mode: opts.mode,
    parts,
    connections,
    now: now(),
  });

  let sessionId: string | null = null;
  if (opts.mode === "assisted") {
    if (!opts.api || !opts.modelId) throw new Error("assisted mode needs api and modelId");
    const created = await opts.api.createSession(opts.modelId, opts.seed);
    sessionId = created.session_id;
    state = gameReducer(state, { type: "PREDICTION", tokens: created.initial_prediction });
  }

  const moves: MoveTrace[] = [];
  for (const connectionId of plan) {
    const conn = state.connections.find((c) => c.id === connectionId);
    if (!conn) throw new Error(`plan references unknown connection ${connectionId}`);
    const needed = conn.requires.filter((pid) => state.parts[pid]?.location !== "workcell");
    const neededTypes = [...new Set(needed.map((pid) => `bring:${state.parts[pid]?.type}`))].sort();
    const predicted = state.pendingPrediction === null ? null : [...state.pendingPrediction].sort();
    const accept =
      predicted !== null && predicted.length === neededTypes.length &&
      predicted.every((t, i) => t === neededTypes[i]);

    let feedbackPosts = 0;
    if (!accept) {
      if (state.pendingPrediction !== null && opts.mode === "assisted") {
        // reject explicitly with the set the bot performs instead
        await opts.api!.postFeedback(sessionId!, false, neededTypes);
        feedbackPosts += 1;
        state = gameReducer(state, { type: "REJECT_PREDICTION" });
      }
      for (const pid of needed) {
        state = gameReducer(state, { type: "FETCH_PART", partId: pid });
      }
    }

    if (!isClickable(state, connectionId)) {
      throw new Error(`connection ${connectionId} not clickable after supplying parts`);
    }
    state = gameReducer(state, { type: "CLICK_CONNECTION", connectionId });
    state = gameReducer(state, { type: "TICK", now: now() });

    let primaryPosts = 0;
    if (opts.mode === "assisted") {
      const reply = await opts.api!.postPrimary(sessionId!, connectionId);
      primaryPosts += 1;
      state = gameReducer(state, { type: "PREDICTION", tokens: reply.prediction });
    }
    moves.push({ connectionId, feedbackPosts, primaryPosts });
  }

  state = gameReducer(state, { type: "FINISH", now: now() });
  return {
    results: results(state),
    demonstration: exportDemonstration(state, opts.userId ?? "game-player"),
    sessionId,
    moves,
    finalState: state,
  };
}
