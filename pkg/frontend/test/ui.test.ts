import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import type { ExploreResponse, FetchLike, PanelEntry, RatingPayload } from "../src/api.js";
import { SESSION_KEY } from "../src/state.js";
import { ACROSS_PANEL_LABEL, WITHIN_PANEL_LABEL, mountApp } from "../src/ui.js";

const FIXED_TOKEN = "0102030405060708090a0b0c0d0e0f10";
const fixedBytes = (n: number) => Uint8Array.from({ length: n }, (_, i) => i + 1);

function entry(
  id: string,
  department: string,
  number: string,
  title: string,
  score: number,
  rank: number,
): PanelEntry {
  return {
    id,
    department,
    number,
    title,
    description: `Long catalog description for ${id}. `.repeat(6).trim(),
    score,
    rank,
  };
}

function demoExplore(): ExploreResponse {
  return {
    favorite: {
      id: "CS101",
      department: "CS",
      number: "101",
      title: "Intro to Computing",
      description: "Programs, machines, and the basics of computational thinking.",
    },
    within_department: [
      entry("CS102", "CS", "102", "Data Structures", 0.9132, 1),
      entry("CS103", "CS", "103", "Discrete Mathematics", 0.8744, 2),
    ],
    across_departments: [
      entry("MATH201", "MATH", "201", "Linear Algebra", 0.8211, 1),
      entry("ART110", "ART", "110", "Drawing Fundamentals", 0.6402, 2),
      entry("BIO150", "BIO", "150", "Genetics", 0.5117, 3),
    ],
    within_reason: null,
    across_reason: null,
  };
}

const SEARCH_ROWS = [
  { id: "CS101", department: "CS", number: "101", title: "Intro to Computing" },
  { id: "CS102", department: "CS", number: "102", title: "Data Structures" },
];

interface Deferred<T> {
  promise: Promise<T>;
  resolve: (value: T) => void;
}

function deferred<T>(): Deferred<T> {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((res) => {
    resolve = res;
  });
  return { promise, resolve };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/** In-memory stand-in for the five service routes. */
function makeServer(explore: ExploreResponse = demoExplore()) {
  const server = {
    calls: [] as string[],
    ratings: [] as RatingPayload[],
    searchDown: false,
    ratingStatus: null as { status: number; body: unknown } | null,
    ratingGate: null as Deferred<Response> | null,
    fetchFn: undefined as unknown as FetchLike,
  };
  server.fetchFn = async (input, init) => {
    server.calls.push(input);
    const url = new URL(input, "http://test");
    if (url.pathname === "/api/courses") {
      if (server.searchDown) throw new TypeError("network down");
      const q = (url.searchParams.get("q") ?? "").toLowerCase();
      return jsonResponse(SEARCH_ROWS.filter((row) => row.id.toLowerCase().includes(q)));
    }
    if (url.pathname === "/api/explore") {
      return jsonResponse(explore);
    }
    if (url.pathname === "/api/ratings") {
      const body = JSON.parse(init?.body as string) as RatingPayload;
      if (server.ratingStatus !== null) {
        return jsonResponse(server.ratingStatus.body, server.ratingStatus.status);
      }
      server.ratings.push(body);
      const response = jsonResponse({ seq: server.ratings.length });
      if (server.ratingGate !== null) return server.ratingGate.promise;
      return response;
    }
    throw new Error(`unexpected request ${input}`);
  };
  return server;
}

function fakeStorage() {
  const data = new Map<string, string>();
  return {
    data,
    getItem: (key: string) => data.get(key) ?? null,
    setItem: (key: string, value: string) => {
      data.set(key, value);
    },
  };
}

const flush = () => new Promise<void>((r) => setTimeout(r, 0));

function mount(server: ReturnType<typeof makeServer>, storage = fakeStorage()) {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app") as HTMLElement;
  // late binding so tests can swap server.fetchFn after mounting
  const client = new ApiClient("", (input, init) => server.fetchFn(input, init));
  const state = mountApp(root, client, storage, fixedBytes);
  return { root, state, storage };
}

function searchBox(root: HTMLElement): HTMLInputElement {
  return root.querySelector("#course-search") as HTMLInputElement;
}

async function type(root: HTMLElement, text: string): Promise<void> {
  const input = searchBox(root);
  input.value = text;
  input.dispatchEvent(new Event("input"));
  await flush();
}

async function selectFavorite(root: HTMLElement): Promise<void> {
  await type(root, "cs101");
  (root.querySelector("button.suggestion") as HTMLButtonElement).click();
  await flush();
}

function withinEntries(root: HTMLElement): HTMLElement[] {
  return Array.from(root.querySelectorAll("#panel-within .entry"));
}

function pickRadio(scope: HTMLElement, panel: string, id: string, statement: string, value: number): void {
  const selector = `input[name="rate-${panel}-${id}-${statement}"][value="${value}"]`;
  const radio = scope.querySelector(selector) as HTMLInputElement;
  radio.click();
}

function submitButton(entryNode: HTMLElement): HTMLButtonElement {
  return entryNode.querySelector("button.submit") as HTMLButtonElement;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("typeahead", () => {
  it("makes no request on mount or for an empty query", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await type(root, "");
    expect(server.calls).toEqual([]);
    expect(root.querySelectorAll("button.suggestion")).toHaveLength(0);
  });

  it("renders one row per match", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await type(root, "cs102");
    const rows = root.querySelectorAll("button.suggestion");
    expect(rows).toHaveLength(1);
    expect(rows[0].textContent).toContain("CS102");
    expect(rows[0].textContent).toContain("Data Structures");
  });

  it("shows an inline error with a working retry on network failure", async () => {
    const server = makeServer();
    const { root } = mount(server);
    server.searchDown = true;
    await type(root, "cs");
    const errorBox = root.querySelector(".search-error") as HTMLElement;
    expect(errorBox.hasAttribute("hidden")).toBe(false);
    expect(errorBox.textContent).toContain("Search failed");

    server.searchDown = false;
    (errorBox.querySelector("button.retry") as HTMLButtonElement).click();
    await flush();
    expect(errorBox.hasAttribute("hidden")).toBe(true);
    expect(root.querySelectorAll("button.suggestion").length).toBeGreaterThan(0);
  });

  it("is keyboard reachable: Enter selects the first suggestion", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await type(root, "cs101");
    searchBox(root).dispatchEvent(new KeyboardEvent("keydown", { key: "Enter" }));
    await flush();
    expect(server.calls.some((url) => url.startsWith("/api/explore"))).toBe(true);
    expect((root.querySelector("#explore") as HTMLElement).hasAttribute("hidden")).toBe(false);
  });
});

describe("explore panels", () => {
  it("renders both labeled panels with every display field", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);

    const headings = Array.from(root.querySelectorAll(".panel h2")).map((h) => h.textContent);
    expect(headings).toEqual([WITHIN_PANEL_LABEL, ACROSS_PANEL_LABEL]);

    const within = withinEntries(root);
    const across = Array.from(root.querySelectorAll("#panel-across .entry"));
    expect(within.length).toBe(2);
    expect(across.length).toBe(3);
    expect(within.length).toBeLessThanOrEqual(5);
    expect(across.length).toBeLessThanOrEqual(5);

    const first = within[0];
    expect(first.querySelector(".code")?.textContent).toBe("CS 102");
    expect(first.querySelector(".title")?.textContent).toBe("Data Structures");
    expect(first.querySelector(".description")?.textContent).toContain(
      "Long catalog description for CS102",
    );
    expect(root.querySelector("#favorite-card")?.textContent).toContain("Intro to Computing");
  });

  it("shows scores and ranks verbatim from the payload", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const meta = withinEntries(root)[0].querySelector(".meta") as HTMLElement;
    expect(meta.dataset.score).toBe("0.9132");
    expect(meta.dataset.rank).toBe("1");
    expect(meta.textContent).toContain("0.9132");
    expect(meta.textContent).toContain("rank 1");
  });

  it("explains an empty panel using the service reason", async () => {
    const explore = demoExplore();
    explore.within_department = [];
    explore.within_reason = "favorite not in model vocabulary";
    const server = makeServer(explore);
    const { root } = mount(server);
    await selectFavorite(root);
    const placeholder = root.querySelector("#panel-within .placeholder") as HTMLElement;
    expect(placeholder.textContent).toContain("favorite not in model vocabulary");
    expect(root.querySelectorAll("#panel-across .entry")).toHaveLength(3);
  });

  it("explains an empty panel without a reason", async () => {
    const explore = demoExplore();
    explore.across_departments = [];
    const server = makeServer(explore);
    const { root } = mount(server);
    await selectFavorite(root);
    const placeholder = root.querySelector("#panel-across .placeholder") as HTMLElement;
    expect(placeholder.textContent).toContain("outside this department");
  });

  it("expands and collapses descriptions", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const entryNode = withinEntries(root)[0];
    const description = entryNode.querySelector("p.description") as HTMLElement;
    const toggle = entryNode.querySelector("button.toggle") as HTMLButtonElement;

    expect(description.classList.contains("collapsed")).toBe(true);
    expect(toggle.getAttribute("aria-expanded")).toBe("false");
    toggle.click();
    expect(description.classList.contains("collapsed")).toBe(false);
    expect(toggle.getAttribute("aria-expanded")).toBe("true");
    toggle.click();
    expect(description.classList.contains("collapsed")).toBe(true);
  });
});

describe("rating submission", () => {
  it("keeps submit disabled until all three statements are answered", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const entryNode = withinEntries(root)[0];
    const button = submitButton(entryNode);

    expect(button.disabled).toBe(true);
    pickRadio(entryNode, "within", "CS102", "unexpectedness", 4);
    expect(button.disabled).toBe(true);
    pickRadio(entryNode, "within", "CS102", "interest", 5);
    expect(button.disabled).toBe(true);
    pickRadio(entryNode, "within", "CS102", "novelty", 2);
    expect(button.disabled).toBe(false);
  });

  it("posts exactly the form values and shows the acknowledgment", async () => {
    const server = makeServer();
    const { root, state } = mount(server);
    await selectFavorite(root);
    const entryNode = withinEntries(root)[0];
    pickRadio(entryNode, "within", "CS102", "unexpectedness", 4);
    pickRadio(entryNode, "within", "CS102", "interest", 5);
    pickRadio(entryNode, "within", "CS102", "novelty", 2);
    submitButton(entryNode).click();
    await flush();

    expect(server.ratings).toHaveLength(1);
    expect(server.ratings[0]).toEqual({
      session_id: FIXED_TOKEN,
      favorite: "CS101",
      rated_course: "CS102",
      panel: "within",
      unexpectedness: 4,
      interest: 5,
      novelty: 2,
    });
    expect(state.sessionId).toBe(FIXED_TOKEN);

    const status = entryNode.querySelector(".submit-status") as HTMLElement;
    expect(status.textContent).toContain("Recorded");
    expect(status.textContent).toContain("#1");
    expect(submitButton(entryNode).disabled).toBe(true);
    const radios = Array.from(entryNode.querySelectorAll("fieldset.ratings input"));
    expect(radios.every((radio) => (radio as HTMLInputElement).disabled)).toBe(true);
  });

  it("includes the optional list-level answers when given", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const panel = root.querySelector("#panel-within") as HTMLElement;

    const diversity = panel.querySelector(
      'input[name="rate-within-list-list_diversity"][value="5"]',
    ) as HTMLInputElement;
    diversity.click();
    const commonality = panel.querySelector(
      'input[name="rate-within-list-list_commonality"][value="3"]',
    ) as HTMLInputElement;
    commonality.click();
    const remark = panel.querySelector("textarea.commonality-text") as HTMLTextAreaElement;
    remark.value = "all build on programming basics";
    remark.dispatchEvent(new Event("input"));

    const entryNode = withinEntries(root)[1];
    pickRadio(entryNode, "within", "CS103", "unexpectedness", 1);
    pickRadio(entryNode, "within", "CS103", "interest", 3);
    pickRadio(entryNode, "within", "CS103", "novelty", 5);
    submitButton(entryNode).click();
    await flush();

    expect(server.ratings).toHaveLength(1);
    expect(server.ratings[0]).toMatchObject({
      rated_course: "CS103",
      list_diversity: 5,
      list_commonality: 3,
      commonality_text: "all build on programming basics",
    });
  });

  it("guards against a duplicate submit while the request is pending", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const entryNode = withinEntries(root)[0];
    pickRadio(entryNode, "within", "CS102", "unexpectedness", 3);
    pickRadio(entryNode, "within", "CS102", "interest", 3);
    pickRadio(entryNode, "within", "CS102", "novelty", 3);

    server.ratingGate = deferred<Response>();
    const button = submitButton(entryNode);
    button.click();
    expect(button.disabled).toBe(true);
    button.click();
    button.click();
    server.ratingGate.resolve(jsonResponse({ seq: 1 }));
    await flush();

    expect(server.ratings).toHaveLength(1);
    expect(button.disabled).toBe(true);
  });

  it("surfaces server-side validation errors and allows a resubmit", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const entryNode = withinEntries(root)[0];
    pickRadio(entryNode, "within", "CS102", "unexpectedness", 2);
    pickRadio(entryNode, "within", "CS102", "interest", 2);
    pickRadio(entryNode, "within", "CS102", "novelty", 2);

    server.ratingStatus = {
      status: 400,
      body: { error: { code: "validation_error", message: "invalid request", fields: ["novelty"] } },
    };
    submitButton(entryNode).click();
    await flush();

    const status = entryNode.querySelector(".submit-status") as HTMLElement;
    expect(status.textContent).toContain("Rejected");
    expect(status.textContent).toContain("novelty");
    expect(submitButton(entryNode).disabled).toBe(false);

    server.ratingStatus = null;
    submitButton(entryNode).click();
    await flush();
    expect(server.ratings).toHaveLength(1);
    expect((entryNode.querySelector(".submit-status") as HTMLElement).textContent).toContain(
      "Recorded",
    );
  });

  it("reports a network failure without recording a rating", async () => {
    const server = makeServer();
    const { root } = mount(server);
    await selectFavorite(root);
    const entryNode = withinEntries(root)[0];
    pickRadio(entryNode, "within", "CS102", "unexpectedness", 2);
    pickRadio(entryNode, "within", "CS102", "interest", 2);
    pickRadio(entryNode, "within", "CS102", "novelty", 2);

    const realFetch = server.fetchFn;
    server.fetchFn = (input, init) => {
      if (input.startsWith("/api/ratings")) {
        return Promise.reject(new TypeError("network down"));
      }
      return realFetch(input, init);
    };
    submitButton(entryNode).click();
    await flush();

    expect(server.ratings).toHaveLength(0);
    const status = entryNode.querySelector(".submit-status") as HTMLElement;
    expect(status.textContent).toContain("network error");
    expect(submitButton(entryNode).disabled).toBe(false);
  });
});

describe("session identity", () => {
  it("mints one token and reuses it across mounts", async () => {
    const storage = fakeStorage();
    const server = makeServer();
    const first = mount(server, storage);
    expect(first.state.sessionId).toMatch(/^[0-9a-f]{32}$/);
    expect(storage.data.get(SESSION_KEY)).toBe(first.state.sessionId);

    const second = mount(makeServer(), storage);
    expect(second.state.sessionId).toBe(first.state.sessionId);
  });
});
