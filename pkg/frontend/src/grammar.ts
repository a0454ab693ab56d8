/**
 * Client-side mirror of the nine-template question grammar.
 *
 * Rendering here gives instant previews; the server remains the source of
 * truth on submit. Golden fixtures generated from the backend grammar pin
 * the two implementations to identical output.
 */

export const TEMPLATES = {
  PROPERTY: 1,
  POSSESSION: 2,
  LOCATION: 3,
  QUANTITY: 4,
  PART_MEMBER_OF: 5,
  HAS_PART_MEMBER: 6,
  COPULAR: 7,
  SUB_SPECIFICATION: 8,
  TIME: 9,
} as const;

export type TemplateId = (typeof TEMPLATES)[keyof typeof TEMPLATES];

export type WhChoice = "what" | "who";
export type PartMemberChoice = "part" | "member";
export type AmountChoice = "much" | "many";

/** Slot fillers, in the wire shape the service's QA objects use. */
export interface QuestionForm {
  template: TemplateId;
  property?: string;
  wh?: WhChoice;
  part_member?: PartMemberChoice;
  much_many?: AmountChoice;
  article: boolean;
}

export const TEMPLATE_LABELS: Record<TemplateId, string> = {
  1: "Property",
  2: "Possession",
  3: "Location",
  4: "Quantity",
  5: "Part/member of",
  6: "Has part/member",
  7: "Copular",
  8: "Sub-specification",
  9: "Time",
};

const WH_TEMPLATES: TemplateId[] = [6, 7];
const PART_MEMBER_TEMPLATES: TemplateId[] = [5, 6];
const ARTICLE_TEMPLATES: TemplateId[] = [1, 7];

/** Every problem with the form's slot assignment; empty means valid. */
export function formProblems(form: QuestionForm): string[] {
  const problems: string[] = [];
  const t = form.template;
  if ((form.property !== undefined) !== (t === TEMPLATES.PROPERTY)) {
    problems.push("property word required exactly for the Property template");
  }
  if (form.property !== undefined && form.property.trim() === "") {
    problems.push("property word must be nonempty");
  }
  if ((form.wh !== undefined) !== WH_TEMPLATES.includes(t)) {
    problems.push("what/who choice required exactly for templates 6 and 7");
  }
  if ((form.part_member !== undefined) !== PART_MEMBER_TEMPLATES.includes(t)) {
    problems.push("part/member choice required exactly for templates 5 and 6");
  }
  if ((form.much_many !== undefined) !== (t === TEMPLATES.QUANTITY)) {
    problems.push("much/many choice required exactly for the Quantity template");
  }
  if (form.article && !ARTICLE_TEMPLATES.includes(t)) {
    problems.push("the optional article applies only to Property and Copular");
  }
  return problems;
}

/** Render the question for a valid form; throws on an invalid one. */
export function renderQuestion(form: QuestionForm, noun: string): string {
  const problems = formProblems(form);
  if (problems.length > 0) {
    throw new Error(`invalid question form: ${problems.join("; ")}`);
  }
  const the = form.article ? "the " : "";
  let q: string;
  switch (form.template) {
    case TEMPLATES.PROPERTY:
      q = `what is the [${form.property!.trim()}] of ${the}${noun}?`;
      break;
    case TEMPLATES.POSSESSION:
      q = `whose ${noun}?`;
      break;
    case TEMPLATES.LOCATION:
      q = `where is the ${noun}?`;
      break;
    case TEMPLATES.QUANTITY:
      q = `how ${form.much_many} ${noun}?`;
      break;
    case TEMPLATES.PART_MEMBER_OF:
      q = `what is the ${noun} a ${form.part_member} of?`;
      break;
    case TEMPLATES.HAS_PART_MEMBER:
      q = `${form.wh} is a ${form.part_member} of ${noun}?`;
      break;
    case TEMPLATES.COPULAR:
      q = `${form.wh} is ${the}${noun}?`;
      break;
    case TEMPLATES.SUB_SPECIFICATION:
      q = `what kind of ${noun}?`;
      break;
    case TEMPLATES.TIME:
      q = `when is the ${noun}?`;
      break;
  }
  return q.charAt(0).toUpperCase() + q.slice(1);
}
