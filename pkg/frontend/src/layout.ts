import type { ConnectionSlot, PartInstance } from "./types.js";

export interface TaskFile {
  task_id: string;
  parts: Array<{ part_id: string; part_type: string; fungible: boolean }>;
  primary_actions: Array<{ action_id: string; required_part_types: string[] }>;
  secondary_actions: Array<{ action_id: string; supplied_part_type: string }>;
}

const CONNECTION_ID = /^conn_(frame|bracket|shelf)_(\d+)_([a-z])$/;

/** Map a bookcase connection id to the concrete parts it joins.
 *
 * The fixture's ids carry the pairing: frame k joins long/short board k,
 * bracket k mounts connector k, shelf connection k sits on shelf k. Tasks
 * without that structure fall back to the first instance of each required
 * type, which keeps the board playable if less physical.
 */
export function requiredInstances(
  actionId: string,
  requiredTypes: string[],
  parts: PartInstance[],
): string[] {
  const m = CONNECTION_ID.exec(actionId);
  if (m) {
    const k = m[2];
    switch (m[1]) {
      case "frame":
        return [`long_board_${k}`, `short_board_${k}`];
      case "bracket":
        return [`connector_${k}`];
      case "shelf":
        return [`shelf_${k}`];
    }
  }
  return requiredTypes.map((t) => {
    const first = parts.find((p) => p.type === t);
    if (!first) throw new Error(`task has no part of type ${t}`);
    return first.id;
  });
}

export function buildParts(task: TaskFile): PartInstance[] {
  return task.parts.map((p) => ({ id: p.part_id, type: p.part_type, location: "storage" }));
}

export function buildConnections(task: TaskFile, parts: PartInstance[]): ConnectionSlot[] {
  return task.primary_actions.map((a) => {
    const m = CONNECTION_ID.exec(a.action_id);
    return {
      id: a.action_id,
      requires: requiredInstances(a.action_id, a.required_part_types, parts),
      group: (m ? m[1] : "frame") as ConnectionSlot["group"],
      done: false,
    };
  });
}

/** A dominant preference: frames, then brackets, then shelves one side first. */
export function oneSidePlan(connections: ConnectionSlot[]): string[] {
  const frames = connections.filter((c) => c.group === "frame").map((c) => c.id).sort();
  const brackets = connections.filter((c) => c.group === "bracket").map((c) => c.id).sort();
  const shelves = connections.filter((c) => c.group === "shelf").map((c) => c.id).sort();
  const sideOne = shelves.filter((id) => id.endsWith("_a") || id.endsWith("_b"));
  const sideTwo = shelves.filter((id) => !sideOne.includes(id));
  return [...frames, ...brackets, ...sideOne, ...sideTwo];
}
