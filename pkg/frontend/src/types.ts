export type LabelValue = "chiastic" | "non_chiastic" | "none";

export interface Candidate {
  id: string;
  book: string;
  start_ref: string;
  end_ref: string;
  granularity: string;
  n_units: number;
  mu_chiasmus: number;
  mu_non_pair: number;
  final: number;
  z: number;
  unit_refs: string[];
  unit_texts?: string[];
  unit_translations?: string[];
  rank?: number;
}

export interface CandidateListPayload {
  total: number;
  candidates: Candidate[];
}

export interface CandidateIdBody {
  granularity: string;
  book: string;
  start_ref: string;
  n_units: number;
}

export interface AnnotationRecordPayload {
  candidate_id: CandidateIdBody;
  annotator: string;
  label: LabelValue;
  ts: string;
}

export interface AgreementPayload {
  k: number;
  annotators: string[];
  n_overlap: number;
  kappa: number | null;
  precision_at_k: number | null;
  missing: string[];
  reason: string | null;
}
