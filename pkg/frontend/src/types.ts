export type Mode = "assisted" | "unassisted";

export type PartLocation = "storage" | "workcell" | "staged";

export interface PartInstance {
  id: string;
  type: string;
  location: PartLocation;
}

export interface ConnectionSlot {
  id: string;
  /** part instance ids that must be in the workcell before this is clickable */
  requires: string[];
  group: "frame" | "bracket" | "shelf";
  done: boolean;
}

export interface RawAction {
  id: string;
  kind: "primary" | "secondary";
}

export interface GameResults {
  mode: Mode;
  elapsedMs: number;
  fetchClicks: number;
  predictionsOffered: number;
  predictionsAccepted: number;
}

export interface GameState {
  mode: Mode;
  parts: Record<string, PartInstance>;
  connections: ConnectionSlot[];
  /** canonical tokens of the outstanding prediction, null when none */
  pendingPrediction: string[] | null;
  /** part ids the robot brought for the pending prediction */
  stagedParts: string[];
  /** manual storage clicks since the previous connection click */
  fetchedThisMove: string[];
  fetchClicks: number;
  predictionsOffered: number;
  predictionsAccepted: number;
  /** full raw action log, exported as a Demonstration at the end */
  actionLog: RawAction[];
  startedAt: number | null;
  lastTickAt: number | null;
  elapsedMs: number;
  finished: boolean;
}

export type GameEvent =
  | { type: "START"; mode: Mode; parts: PartInstance[]; connections: ConnectionSlot[]; now: number }
  | { type: "PREDICTION"; tokens: string[] }
  | { type: "REJECT_PREDICTION" }
  | { type: "FETCH_PART"; partId: string }
  | { type: "CLICK_CONNECTION"; connectionId: string }
  | { type: "TICK"; now: number }
  | { type: "FINISH"; now: number };
