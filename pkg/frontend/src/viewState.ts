/** Per-assignment editing state: the QA draft and the submitted list. */

import { QuestionForm, TEMPLATES, TemplateId, formProblems, renderQuestion } from "./grammar.js";
import { TokenRange, rangeLength } from "./spanSelect.js";

export interface SentenceView {
  id: string;
  text: string;
  tokens: { start: number; end: number }[];
}

/** QA object in the service's wire shape. */
export interface QaPayload extends QuestionForm {
  question: string;
  answer: { first_token: number; last_token: number };
  answer_text: string;
}

export interface Draft {
  template: TemplateId | null;
  property: string;
  wh: "what" | "who" | null;
  part_member: "part" | "member" | null;
  much_many: "much" | "many" | null;
  article: boolean;
  range: TokenRange | null;
}

export function emptyDraft(): Draft {
  return {
    template: null,
    property: "",
    wh: null,
    part_member: null,
    much_many: null,
    article: false,
    range: null,
  };
}

/** The draft's slots as a wire-shaped form; null until a template is chosen. */
export function draftForm(draft: Draft): QuestionForm | null {
  if (draft.template === null) {
    return null;
  }
  const form: QuestionForm = { template: draft.template, article: draft.article };
  if (draft.template === TEMPLATES.PROPERTY) form.property = draft.property;
  if (draft.wh !== null) form.wh = draft.wh;
  if (draft.part_member !== null) form.part_member = draft.part_member;
  if (draft.much_many !== null) form.much_many = draft.much_many;
  return form;
}

/**
 * Everything blocking submission, as user-facing strings. Submission is
 * enabled only when this is empty; the duplicate-answer rule is mirrored
 * client-side so the service can never reject for structural reasons.
 */
export function submitProblems(draft: Draft, submitted: QaPayload[]): string[] {
  const problems: string[] = [];
  const form = draftForm(draft);
  if (form === null) {
    problems.push("choose a question template");
  } else {
    problems.push(...formProblems(form));
  }
  if (draft.range === null || rangeLength(draft.range) < 1) {
    problems.push("select an answer span in the sentence");
  } else {
    const { first, last } = draft.range;
    if (submitted.some((qa) => qa.answer.first_token === first && qa.answer.last_token === last)) {
      problems.push("another question already uses this exact answer span");
    }
  }
  return problems;
}

export function canSubmit(draft: Draft, submitted: QaPayload[]): boolean {
  return submitProblems(draft, submitted).length === 0;
}

/** Live question preview, or null while the draft is incomplete. */
export function questionPreview(draft: Draft, noun: string): string | null {
  const form = draftForm(draft);
  if (form === null || formProblems(form).length > 0) {
    return null;
  }
  return renderQuestion(form, noun);
}

/** Build the wire QA object for a submittable draft. */
export function toQaPayload(draft: Draft, sentence: SentenceView, noun: string): QaPayload {
  const problems = submitProblems(draft, []);
  if (problems.length > 0) {
    throw new Error(`draft not submittable: ${problems.join("; ")}`);
  }
  const form = draftForm(draft)!;
  const range = draft.range!;
  return {
    ...form,
    question: renderQuestion(form, noun),
    answer: { first_token: range.first, last_token: range.last },
    answer_text: sentence.text.slice(
      sentence.tokens[range.first].start,
      sentence.tokens[range.last].end,
    ),
  };
}

/**
 * Property-slot autocomplete: most recent first, deduplicated, seeded with
 * the common values when history is thin.
 */
export function propertySuggestions(history: string[], limit = 8): string[] {
  const seeds = ["name", "purpose", "cause", "status"];
  const seen = new Set<string>();
  const out: string[] = [];
  for (const word of [...[...history].reverse(), ...seeds]) {
    const w = word.trim();
    if (w !== "" && !seen.has(w)) {
      seen.add(w);
      out.push(w);
    }
    if (out.length === limit) break;
  }
  return out;
}
