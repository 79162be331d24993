export class ApiError extends Error {
    constructor(status, message) {
        super(message);
        this.status = status;
    }
}
async function request(input, init) {
    let response;
    try {
        response = await fetch(input, init);
    }
    catch (err) {
        throw new ApiError(0, `API unreachable: ${String(err)}`);
    }
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = await response.json();
            if (body && body.detail)
                detail = JSON.stringify(body.detail);
        }
        catch {
            // keep the status text
        }
        throw new ApiError(response.status, `HTTP ${response.status}: ${detail}`);
    }
    return (await response.json());
}
export class ApiClient {
    constructor(base = "") {
        this.base = base;
    }
    async candidates(granularity, limit) {
        const params = new URLSearchParams({ limit: String(limit) });
        if (granularity)
            params.set("granularity", granularity);
        return request(`${this.base}/api/candidates?${params}`);
    }
    async labels(annotator) {
        const params = new URLSearchParams({ annotator });
        const payload = await request(`${this.base}/api/labels?${params}`);
        return payload.labels;
    }
    async submitLabel(candidate, annotator, label) {
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
        const payload = await request(`${this.base}/api/labels`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        return payload.record;
    }
    async agreement(k) {
        return request(`${this.base}/api/agreement?k=${k}`);
    }
}
