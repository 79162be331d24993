import type {
  AgreementPayload,
  AnnotationRecordPayload,
  Candidate,
  CandidateListPayload,
  LabelValue,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(input: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(input, init);
  } catch (err) {
    throw new ApiError(0, `API unreachable: ${String(err)}`);
  }
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && body.detail) detail = JSON.stringify(body.detail);
    } catch {
      // keep the status text
    }
    throw new ApiError(response.status, `HTTP ${response.status}: ${detail}`);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  async candidates(granularity: string | null, limit: number): Promise<CandidateListPayload> {
    const params = new URLSearchParams({ limit: String(limit) });
    if (granularity) params.set("granularity", granularity);
    return request<CandidateListPayload>(`${this.base}/api/candidates?${params}`);
  }

  async labels(annotator: string): Promise<AnnotationRecordPayload[]> {
    const params = new URLSearchParams({ annotator });
    const payload = await request<{ labels: AnnotationRecordPayload[] }>(`${this.base}/api/labels?${params}`);
    return payload.labels;
  }

  async submitLabel(candidate: Candidate, annotator: string, label: LabelValue): Promise<AnnotationRecordPayload> {
    const body = {
      candidate_id: {
        granularity: candidate.granularity,
        book: candidate.book,
        start_ref: candidate.start_ref,
        n_units: candidate.n_units,
      },
      annotator,
      label,
    };
    const payload = await request<{ record: AnnotationRecordPayload }>(`${this.base}/api/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    return payload.record;
  }

  async agreement(k: number): Promise<AgreementPayload> {
    return request<AgreementPayload>(`${this.base}/api/agreement?k=${k}`);
  }
}
