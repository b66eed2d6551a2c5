import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import type { FetchLike, RatingPayload } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

interface Recorded {
  url: string;
  init?: RequestInit;
}

function clientWith(
  respond: (url: string, init?: RequestInit) => Response | Promise<Response>,
  baseUrl = "",
) {
  const calls: Recorded[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return respond(url, init);
  };
  return { client: new ApiClient(baseUrl, fetchFn), calls };
}

const sampleRating: RatingPayload = {
  session_id: "b".repeat(32),
  favorite: "CS101",
  rated_course: "MATH201",
  panel: "across",
  unexpectedness: 4,
  interest: 5,
  novelty: 2,
};

describe("request construction", () => {
  it("encodes search query and limit", async () => {
    const { client, calls } = clientWith(() =>
      jsonResponse([{ id: "LA1", department: "MATH", number: "54", title: "Linear Algebra" }]),
    );
    const rows = await client.searchCourses("linear algebra", 8);
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("/api/courses?q=linear+algebra&limit=8");
    expect(rows).toHaveLength(1);
    expect(rows[0].id).toBe("LA1");
  });

  it("encodes the explore course id", async () => {
    const { client, calls } = clientWith(() =>
      jsonResponse({
        favorite: { id: "A&B", department: "X", number: "1", title: "t", description: "d" },
        within_department: [],
        across_departments: [],
        within_reason: null,
        across_reason: null,
      }),
    );
    await client.explore("A&B");
    expect(calls[0].url).toBe("/api/explore?course_id=A%26B");
  });

  it("prefixes every path with the base url", async () => {
    const { client, calls } = clientWith(() => jsonResponse({ status: "ok" }), "http://svc:8080");
    await client.health();
    expect(calls[0].url).toBe("http://svc:8080/health");
  });

  it("lists models", async () => {
    const { client } = clientWith(() =>
      jsonResponse([{ label: "course2vec", dim: 16, n_courses: 20, role: "equivalency" }]),
    );
    const models = await client.models();
    expect(models[0].label).toBe("course2vec");
    expect(models[0].role).toBe("equivalency");
  });

  it("posts ratings as JSON and returns the sequence number", async () => {
    const { client, calls } = clientWith(() => jsonResponse({ seq: 7 }));
    const ack = await client.submitRating(sampleRating);
    expect(ack.seq).toBe(7);
    expect(calls[0].url).toBe("/api/ratings");
    expect(calls[0].init?.method).toBe("POST");
    expect((calls[0].init?.headers as Record<string, string>)["content-type"]).toBe(
      "application/json",
    );
    expect(JSON.parse(calls[0].init?.body as string)).toEqual(sampleRating);
  });
});

describe("error mapping", () => {
  it("maps an explore 404 to an ApiError with the service code", async () => {
    const { client } = clientWith(() =>
      jsonResponse({ error: { code: "unknown_course", message: "unknown course 'GHOST'" } }, 404),
    );
    const failure = await client.explore("GHOST").then(
      () => null,
      (error: unknown) => error,
    );
    expect(failure).toBeInstanceOf(ApiError);
    const apiError = failure as ApiError;
    expect(apiError.status).toBe(404);
    expect(apiError.code).toBe("unknown_course");
    expect(apiError.message).toContain("GHOST");
  });

  it("surfaces validation field lists from a 400", async () => {
    const { client } = clientWith(() =>
      jsonResponse(
        { error: { code: "validation_error", message: "invalid request", fields: ["novelty"] } },
        400,
      ),
    );
    const failure = await client.submitRating(sampleRating).then(
      () => null,
      (error: unknown) => error,
    );
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).fields).toEqual(["novelty"]);
  });

  it("falls back to a generic error for a non-JSON body", async () => {
    const { client } = clientWith(() => new Response("boom", { status: 500 }));
    const failure = await client.health().then(
      () => null,
      (error: unknown) => error,
    );
    expect(failure).toBeInstanceOf(ApiError);
    const apiError = failure as ApiError;
    expect(apiError.code).toBe("http_error");
    expect(apiError.message).toContain("500");
    expect(apiError.fields).toEqual([]);
  });

  it("lets network-level failures propagate unchanged", async () => {
    const fetchFn: FetchLike = () => Promise.reject(new TypeError("network down"));
    const client = new ApiClient("", fetchFn);
    await expect(client.searchCourses("x")).rejects.toThrow("network down");
  });
});
