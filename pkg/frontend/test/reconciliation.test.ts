import { describe, expect, it } from "vitest";

import {
  Disagreement,
  addQa,
  allResolved,
  buildPanel,
  decisionsPayload,
  setDecision,
} from "../src/reconciliation.js";
import { QaPayload } from "../src/viewState.js";

function qa(template: number, first: number, last: number): QaPayload {
  return {
    template: template as QaPayload["template"],
    article: false,
    question: "Whose album?",
    answer: { first_token: first, last_token: last },
    answer_text: "x",
  };
}

const DISAGREEMENTS: Disagreement[] = [
  { id: "role:1:1", kind: "role", left_qa_index: 1, right_qa_index: 1, left_qa: qa(2, 7, 9), right_qa: qa(1, 7, 9) },
  { id: "extent:1:1", kind: "extent", left_qa_index: 1, right_qa_index: 1, left_qa: qa(2, 7, 9), right_qa: qa(2, 7, 8) },
  { id: "coverage:l2", kind: "coverage", left_qa_index: 2, right_qa_index: null, left_qa: qa(3, 0, 1), right_qa: null },
  { id: "coverage:r2", kind: "coverage", left_qa_index: null, right_qa_index: 2, left_qa: null, right_qa: qa(9, 3, 3) },
];

describe("reconciliation panel", () => {
  it("renders one entry per disagreement with its kind badge", () => {
    const panel = buildPanel(DISAGREEMENTS);
    expect(panel.entries.map((e) => [e.id, e.badge])).toEqual([
      ["role:1:1", "role"],
      ["extent:1:1", "extent"],
      ["coverage:l2", "coverage"],
      ["coverage:r2", "coverage"],
    ]);
  });

  it("offers choose-one controls for matched pairs", () => {
    const panel = buildPanel(DISAGREEMENTS);
    expect(panel.entries[0].actions).toEqual(["keep_left", "keep_right", "edit", "drop"]);
  });

  it("offers only the present side for coverage entries", () => {
    const panel = buildPanel(DISAGREEMENTS);
    expect(panel.entries[2].actions).toEqual(["keep_left", "edit", "drop"]);
    expect(panel.entries[3].actions).toEqual(["keep_right", "edit", "drop"]);
    expect(() => setDecision(panel, "coverage:l2", "keep_right")).toThrow(/not available/);
  });

  it("enables consolidation only when everything is decided", () => {
    let panel = buildPanel(DISAGREEMENTS);
    expect(allResolved(panel)).toBe(false);
    expect(() => decisionsPayload(panel)).toThrow(/undecided/);
    panel = setDecision(panel, "role:1:1", "keep_left");
    panel = setDecision(panel, "extent:1:1", "keep_right");
    panel = setDecision(panel, "coverage:l2", "keep_left");
    expect(allResolved(panel)).toBe(false);
    panel = setDecision(panel, "coverage:r2", "drop");
    expect(allResolved(panel)).toBe(true);
  });

  it("serializes decisions and standalone additions for the service", () => {
    let panel = buildPanel(DISAGREEMENTS);
    panel = setDecision(panel, "role:1:1", "keep_left");
    panel = setDecision(panel, "extent:1:1", "keep_right");
    panel = setDecision(panel, "coverage:l2", "keep_left");
    panel = setDecision(panel, "coverage:r2", "drop", undefined, "agreed off-template");
    panel = addQa(panel, qa(8, 8, 8));
    const payload = decisionsPayload(panel, { co_sign: "ann-b" });
    expect(payload.co_sign).toBe("ann-b");
    expect(payload.decisions).toHaveLength(5);
    expect(payload.decisions[3]).toEqual({
      disagreement_id: "coverage:r2",
      action: "drop",
      note: "agreed off-template",
    });
    expect(payload.decisions[4]).toEqual({
      disagreement_id: null,
      action: "add",
      qa: qa(8, 8, 8),
    });
  });

  it("requires a replacement QA for edits", () => {
    const panel = buildPanel(DISAGREEMENTS);
    expect(() => setDecision(panel, "extent:1:1", "edit")).toThrow(/replacement/);
  });
});
