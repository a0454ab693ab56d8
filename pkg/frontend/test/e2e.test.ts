/**
 * Full workflow against the real annotation service: two annotators submit
 * differing records through the client models, the reconciliation panel
 * mirrors the service's disagreements, and consolidation raises the
 * target's agreement to 1.0.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AnnotationApi } from "../src/api.js";
import { TEMPLATES, formProblems } from "../src/grammar.js";
import { buildPanel, setDecision, decisionsPayload } from "../src/reconciliation.js";
import { Draft, emptyDraft, canSubmit, toQaPayload } from "../src/viewState.js";

const PORT = 8910 + (process.pid % 50);
const BASE = `http://127.0.0.1:${PORT}`;
const TEXT = "The album was released in 1971 by the record label .";
const KEY = "s-album:1";

const LAUNCHER = `
import sys
import uvicorn
from qanoun.service.app import create_app
from qanoun.service.store import ProjectStore

app = create_app(ProjectStore(sys.argv[1]), {"tok-a": "ann-a", "tok-b": "ann-b"})
uvicorn.run(app, host="127.0.0.1", port=int(sys.argv[2]), log_level="warning")
`;

let server: ChildProcess;
const apiA = new AnnotationApi(BASE, "tok-a");
const apiB = new AnnotationApi(BASE, "tok-b");

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/projects/none`, {
        headers: { Authorization: "Bearer tok-a" },
      });
      if (resp.status === 400) return; // service is up, project just unknown
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("annotation service did not come up");
}

beforeAll(async () => {
  const dataDir = mkdtempSync(join(tmpdir(), "qanoun-e2e-"));
  server = spawn("python3", ["-c", LAUNCHER, dataDir, String(PORT)], {
    stdio: ["ignore", "inherit", "inherit"],
  });
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
});

function draft(partial: Partial<Draft>): Draft {
  return { ...emptyDraft(), ...partial };
}

describe("annotation end to end", () => {
  it("runs submit, reconcile, and export against the live service", async () => {
    const created = await apiA.createProject({
      project_id: "e2e",
      sentences: [{ id: "s-album", text: TEXT }],
      roster: ["ann-a", "ann-b"],
      targets: { "s-album": [1] },
    });
    expect(created.targets[0]).toMatchObject({ key: KEY, surface: "album", status: "pending" });

    const view = await apiA.target("e2e", KEY);
    const sentence = view.sentence;
    const noun = view.surface;

    // annotator A: template pick, span select, submit
    const aDrafts = [
      draft({ template: TEMPLATES.TIME, range: { first: 5, last: 5 } }),
      draft({ template: TEMPLATES.POSSESSION, range: { first: 7, last: 9 } }),
    ];
    const aQas = [];
    for (const d of aDrafts) {
      expect(canSubmit(d, aQas)).toBe(true);
      aQas.push(toQaPayload(d, sentence, noun));
    }
    const aResult = await apiA.submitRecord("e2e", KEY, aQas);
    expect(aResult.accepted).toBe(true);

    // annotator B: differing role, extent, and coverage
    const bDrafts = [
      draft({ template: TEMPLATES.TIME, range: { first: 5, last: 5 } }),
      draft({
        template: TEMPLATES.PROPERTY,
        property: "label",
        article: true,
        range: { first: 7, last: 8 },
      }),
      draft({ template: TEMPLATES.LOCATION, range: { first: 3, last: 3 } }),
    ];
    const bQas = [];
    for (const d of bDrafts) {
      expect(canSubmit(d, bQas)).toBe(true);
      bQas.push(toQaPayload(d, sentence, noun));
    }
    const bResult = await apiB.submitRecord("e2e", KEY, bQas);
    expect(bResult.accepted).toBe(true);

    const iaaBefore = (await apiA.targetIaa("e2e", KEY)).iaa_f1;
    expect(iaaBefore).toBeLessThan(1.0);

    // the panel shows exactly the service's disagreements
    const { disagreements } = await apiA.disagreements("e2e", KEY);
    let panel = buildPanel(disagreements);
    expect(panel.entries.map((e) => [e.id, e.kind]).sort()).toEqual([
      ["coverage:r2", "coverage"],
      ["extent:1:1", "extent"],
      ["role:1:1", "role"],
    ]);

    panel = setDecision(panel, "role:1:1", "keep_left");
    panel = setDecision(panel, "extent:1:1", "keep_right");
    panel = setDecision(panel, "coverage:r2", "keep_right");
    const { consolidated } = await apiA.decide(
      "e2e",
      KEY,
      decisionsPayload(panel, { co_sign: "ann-b" }),
    );

    // consolidated record passes the client-side structural checks too
    expect(consolidated.phase).toBe("consolidated");
    const spans = consolidated.qas.map((q) => `${q.answer.first_token}:${q.answer.last_token}`);
    expect(new Set(spans).size).toBe(spans.length);
    for (const qa of consolidated.qas) {
      expect(formProblems(qa)).toEqual([]);
      expect(qa.answer_text).toBe(
        sentence.text.slice(
          sentence.tokens[qa.answer.first_token].start,
          sentence.tokens[qa.answer.last_token].end,
        ),
      );
    }
    expect(
      consolidated.qas.map((q) => [q.template, q.answer.first_token, q.answer.last_token]).sort(),
    ).toEqual([
      [2, 7, 8],
      [3, 3, 3],
      [9, 5, 5],
    ]);

    const iaaAfter = (await apiA.targetIaa("e2e", KEY)).iaa_f1;
    expect(iaaAfter).toBe(1.0);

    const exported = await apiA.export("e2e");
    expect(exported.summary.consolidated).toBe(1);
  }, 30_000);

  it("surfaces service rejections inline", async () => {
    const view = await apiA.target("e2e", KEY);
    const qa = toQaPayload(
      draft({ template: TEMPLATES.TIME, range: { first: 5, last: 5 } }),
      view.sentence,
      view.surface,
    );
    // bypass the client mirror to prove the server still catches duplicates
    const result = await apiA.submitRecord("e2e", KEY, [qa, qa]);
    expect(result.accepted).toBe(false);
    expect(result.violations[0].rule).toBe("duplicate-answer");
  });
});
