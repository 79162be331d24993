import type { AgreementPayload } from "./types.js";

export interface AgreementView {
  computable: boolean;
  kappaText: string;
  precisionText: string;
  detail: string;
}

// Pure formatting of server-computed agreement numbers. The panel never
// derives metrics itself; the API payload is the single source of truth.
export function agreementView(payload: AgreementPayload): AgreementView {
  if (payload.kappa === null) {
    return {
      computable: false,
      kappaText: "not yet computable",
      precisionText: "not yet computable",
      detail: payload.reason ?? "waiting for overlapping labels",
    };
  }
  const precision =
    payload.precision_at_k === null
      ? `pending (${payload.missing.length} of top ${payload.k} unlabeled)`
      : payload.precision_at_k.toFixed(2);
  return {
    computable: true,
    kappaText: payload.kappa.toFixed(2),
    precisionText: precision,
    detail: `${payload.annotators.join(" vs ")}, ${payload.n_overlap} items labeled by both`,
  };
}
