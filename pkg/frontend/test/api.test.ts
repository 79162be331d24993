import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { Candidate } from "../src/types.js";

const CANDIDATE: Candidate = {
  id: "verse|Genesis|Genesis 1:19|5",
  book: "Genesis",
  start_ref: "Genesis 1:19",
  end_ref: "Genesis 1:23",
  granularity: "verse",
  n_units: 5,
  mu_chiasmus: 0.9,
  mu_non_pair: 0.2,
  final: 0.7,
  z: 4.2,
  unit_refs: [],
};

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), { status, headers: { "Content-Type": "application/json" } });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("requests ranked candidates with granularity and limit", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ total: 1, candidates: [CANDIDATE] }));
    vi.stubGlobal("fetch", fetchMock);
    const result = await new ApiClient().candidates("verse", 50);
    expect(fetchMock).toHaveBeenCalledWith("/api/candidates?limit=50&granularity=verse", undefined);
    expect(result.candidates[0].id).toBe(CANDIDATE.id);
  });

  it("posts a label with the candidate identity and returns the record", async () => {
    const record = {
      candidate_id: { granularity: "verse", book: "Genesis", start_ref: "Genesis 1:19", n_units: 5 },
      annotator: "alice",
      label: "chiastic",
      ts: "now",
    };
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ record }, 201));
    vi.stubGlobal("fetch", fetchMock);
    const got = await new ApiClient().submitLabel(CANDIDATE, "alice", "chiastic");
    expect(got).toEqual(record);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/api/labels");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body)).toEqual({
      candidate_id: { granularity: "verse", book: "Genesis", start_ref: "Genesis 1:19", n_units: 5 },
      annotator: "alice",
      label: "chiastic",
    });
  });

  it("surfaces a 422 as an ApiError with the status", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse({ detail: "bad label" }, 422)));
    const err = await new ApiClient().submitLabel(CANDIDATE, "alice", "chiastic").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(422);
    expect(String(err)).toContain("bad label");
  });

  it("maps network failure to status 0 so callers can offer a retry", async () => {
    vi.stubGlobal("fetch", vi.fn().mockRejectedValue(new TypeError("fetch failed")));
    const err = await new ApiClient().agreement(50).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(0);
  });

  it("fetches own labels for the blind session", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ labels: [] }));
    vi.stubGlobal("fetch", fetchMock);
    await new ApiClient().labels("bob");
    expect(fetchMock).toHaveBeenCalledWith("/api/labels?annotator=bob", undefined);
  });

  it("passes the agreement payload through untouched", async () => {
    const payload = { k: 50, annotators: ["a", "b"], n_overlap: 10, kappa: 0.76, precision_at_k: null, missing: [], reason: null };
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(jsonResponse(payload)));
    expect(await new ApiClient().agreement(50)).toEqual(payload);
  });
});
