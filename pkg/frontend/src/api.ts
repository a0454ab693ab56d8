/** Thin typed client over the annotation service's HTTP API. */

import { Disagreement, DecisionWire } from "./reconciliation.js";
import { QaPayload, SentenceView } from "./viewState.js";

export interface TargetSummary {
  key: string;
  sentence_id: string;
  token_index: number;
  surface: string;
  assigned: string[];
  status: "pending" | "in_progress" | "ready_to_reconcile" | "done";
}

export interface TargetView extends TargetSummary {
  sentence: SentenceView;
  my_record: { annotator: string; phase: string; qas: QaPayload[] } | null;
  my_versions: number;
}

export interface SubmitResult {
  accepted: boolean;
  violations: { rule: string; qa_index: number | null; message: string }[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public violations: SubmitResult["violations"] = [],
  ) {
    super(message);
  }
}

export class AnnotationApi {
  constructor(
    private baseUrl: string,
    private token: string,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    });
    const payload = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(
        resp.status,
        String(payload.detail ?? resp.statusText),
        (payload.violations as SubmitResult["violations"]) ?? [],
      );
    }
    return payload as T;
  }

  createProject(spec: {
    project_id: string;
    sentences: { id: string; text: string }[];
    roster: string[];
    policy?: "single" | "paired";
    targets?: Record<string, number[]>;
  }): Promise<{ project_id: string; targets: TargetSummary[] }> {
    return this.request("POST", "/projects", spec);
  }

  assignments(projectId: string): Promise<{ annotator: string; assignments: TargetSummary[] }> {
    return this.request("GET", `/projects/${projectId}/assignments`);
  }

  target(projectId: string, key: string): Promise<TargetView> {
    return this.request("GET", `/projects/${projectId}/targets/${key}`);
  }

  submitRecord(projectId: string, key: string, qas: QaPayload[]): Promise<SubmitResult> {
    return this.request("POST", `/projects/${projectId}/targets/${key}/records`, { qas });
  }

  disagreements(projectId: string, key: string): Promise<{ disagreements: Disagreement[] }> {
    return this.request("GET", `/projects/${projectId}/targets/${key}/disagreements`);
  }

  decide(
    projectId: string,
    key: string,
    payload: { decisions: DecisionWire[]; co_sign?: string; note?: string },
  ): Promise<{ consolidated: { annotator: string; phase: string; qas: QaPayload[] } }> {
    return this.request("POST", `/projects/${projectId}/targets/${key}/decisions`, payload);
  }

  targetIaa(projectId: string, key: string): Promise<{ iaa_f1: number }> {
    return this.request("GET", `/projects/${projectId}/targets/${key}/iaa`);
  }

  export(
    projectId: string,
    partial = false,
  ): Promise<{ records: unknown[]; summary: Record<string, unknown> }> {
    return this.request("GET", `/projects/${projectId}/export?partial=${partial}`);
  }
}
