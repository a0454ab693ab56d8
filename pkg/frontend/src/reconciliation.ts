/** Side-by-side adjudication panel over the service's disagreement list. */

import { QaPayload } from "./viewState.js";

export type DisagreementKind = "role" | "extent" | "coverage";
export type DecisionAction = "keep_left" | "keep_right" | "edit" | "add" | "drop";

/** One disagreement as reported by the service. */
export interface Disagreement {
  id: string;
  kind: DisagreementKind;
  left_qa_index: number | null;
  right_qa_index: number | null;
  left_qa: QaPayload | null;
  right_qa: QaPayload | null;
}

export interface PanelEntry {
  id: string;
  kind: DisagreementKind;
  badge: string;
  left: QaPayload | null;
  right: QaPayload | null;
  /** Actions the service will accept for this entry. */
  actions: DecisionAction[];
  decision: { action: DecisionAction; qa?: QaPayload; note?: string } | null;
}

export interface PanelState {
  entries: PanelEntry[];
  /** Standalone additions agreed during discussion. */
  additions: QaPayload[];
}

const BADGES: Record<DisagreementKind, string> = {
  role: "role",
  extent: "extent",
  coverage: "coverage",
};

function actionsFor(d: Disagreement): DecisionAction[] {
  if (d.kind === "coverage") {
    // only one side exists, so "keep" means keeping that side
    const keep: DecisionAction = d.left_qa !== null ? "keep_left" : "keep_right";
    return [keep, "edit", "drop"];
  }
  return ["keep_left", "keep_right", "edit", "drop"];
}

export function buildPanel(disagreements: Disagreement[]): PanelState {
  return {
    entries: disagreements.map((d) => ({
      id: d.id,
      kind: d.kind,
      badge: BADGES[d.kind],
      left: d.left_qa,
      right: d.right_qa,
      actions: actionsFor(d),
      decision: null,
    })),
    additions: [],
  };
}

export function setDecision(
  panel: PanelState,
  id: string,
  action: DecisionAction,
  qa?: QaPayload,
  note?: string,
): PanelState {
  const entry = panel.entries.find((e) => e.id === id);
  if (entry === undefined) {
    throw new Error(`unknown disagreement ${id}`);
  }
  if (!entry.actions.includes(action)) {
    throw new Error(`action ${action} not available for ${entry.kind} entry ${id}`);
  }
  if (action === "edit" && qa === undefined) {
    throw new Error("edit decisions need a replacement QA");
  }
  return {
    ...panel,
    entries: panel.entries.map((e) =>
      e.id === id ? { ...e, decision: { action, qa, note } } : e,
    ),
  };
}

export function addQa(panel: PanelState, qa: QaPayload): PanelState {
  return { ...panel, additions: [...panel.additions, qa] };
}

/** The consolidate button is enabled only when every entry is decided. */
export function allResolved(panel: PanelState): boolean {
  return panel.entries.every((e) => e.decision !== null);
}

export interface DecisionWire {
  disagreement_id: string | null;
  action: DecisionAction;
  qa?: QaPayload;
  note?: string;
}

/** The POST body for the service's decisions endpoint. */
export function decisionsPayload(
  panel: PanelState,
  opts: { co_sign?: string; note?: string } = {},
): { decisions: DecisionWire[]; co_sign?: string; note?: string } {
  if (!allResolved(panel)) {
    const open = panel.entries.filter((e) => e.decision === null).map((e) => e.id);
    throw new Error(`undecided disagreements: ${open.join(", ")}`);
  }
  const decisions: DecisionWire[] = panel.entries.map((e) => ({
    disagreement_id: e.id,
    action: e.decision!.action,
    ...(e.decision!.qa !== undefined ? { qa: e.decision!.qa } : {}),
    ...(e.decision!.note !== undefined ? { note: e.decision!.note } : {}),
  }));
  for (const qa of panel.additions) {
    decisions.push({ disagreement_id: null, action: "add", qa });
  }
  return { decisions, ...opts };
}
