// Pure page state: session identity, rating drafts with their validity
// rules, and the typeahead request lifecycle. No DOM access here, so all
// of it is testable without a browser.

import type { CourseSummary, ExploreResponse, RatingPayload } from "./api.js";

export const LIKERT_MIN = 1;
export const LIKERT_MAX = 5;

export const COURSE_STATEMENTS = ["unexpectedness", "interest", "novelty"] as const;
export type CourseStatement = (typeof COURSE_STATEMENTS)[number];

export const LIST_STATEMENTS = ["list_diversity", "list_commonality"] as const;
export type ListStatement = (typeof LIST_STATEMENTS)[number];

export type Panel = "within" | "across";

/** Answers for the three required statements about one suggested course. */
export interface CourseDraft {
  unexpectedness: number | null;
  interest: number | null;
  novelty: number | null;
}

/** Optional whole-list answers shared by every rating sent from a panel. */
export interface ListDraft {
  list_diversity: number | null;
  list_commonality: number | null;
  commonality_text: string;
}

export function emptyCourseDraft(): CourseDraft {
  return { unexpectedness: null, interest: null, novelty: null };
}

export function emptyListDraft(): ListDraft {
  return { list_diversity: null, list_commonality: null, commonality_text: "" };
}

/** True for an integer on the 1..5 agreement scale. */
export function isLikert(value: unknown): value is number {
  return (
    typeof value === "number" &&
    Number.isInteger(value) &&
    value >= LIKERT_MIN &&
    value <= LIKERT_MAX
  );
}

/** Returns a copy of the draft with one statement answered.
 *  Out-of-scale values are rejected here, before anything reaches the
 *  network, with a RangeError. */
export function setStatement(
  draft: CourseDraft,
  statement: CourseStatement,
  value: number,
): CourseDraft {
  if (!isLikert(value)) {
    throw new RangeError(`${statement} must be an integer in 1..5, got ${value}`);
  }
  return { ...draft, [statement]: value };
}

export function setListStatement(
  draft: ListDraft,
  statement: ListStatement,
  value: number,
): ListDraft {
  if (!isLikert(value)) {
    throw new RangeError(`${statement} must be an integer in 1..5, got ${value}`);
  }
  return { ...draft, [statement]: value };
}

export function missingStatements(draft: CourseDraft): CourseStatement[] {
  return COURSE_STATEMENTS.filter((name) => draft[name] === null);
}

/** Submit stays disabled until every per-course statement is answered. */
export function canSubmit(draft: CourseDraft): boolean {
  return missingStatements(draft).length === 0;
}

/** Assembles the POST body for one rating. The optional list-level answers
 *  are attached only when actually given; empty remark text is omitted. */
export function buildRatingPayload(args: {
  sessionId: string;
  favorite: string;
  ratedCourse: string;
  panel: Panel;
  course: CourseDraft;
  list: ListDraft;
}): RatingPayload {
  const { course, list } = args;
  if (!canSubmit(course)) {
    throw new Error(`rating draft incomplete: ${missingStatements(course).join(", ")}`);
  }
  const payload: RatingPayload = {
    session_id: args.sessionId,
    favorite: args.favorite,
    rated_course: args.ratedCourse,
    panel: args.panel,
    unexpectedness: course.unexpectedness as number,
    interest: course.interest as number,
    novelty: course.novelty as number,
  };
  if (list.list_diversity !== null) payload.list_diversity = list.list_diversity;
  if (list.list_commonality !== null) payload.list_commonality = list.list_commonality;
  const remark = list.commonality_text.trim();
  if (remark !== "") payload.commonality_text = remark;
  return payload;
}

export const SESSION_KEY = "explore.session_id";

/** 128-bit random token rendered as 32 hex characters. */
export function newSessionToken(randomBytes: (n: number) => Uint8Array): string {
  const bytes = randomBytes(16);
  if (bytes.length !== 16) {
    throw new Error(`expected 16 random bytes, got ${bytes.length}`);
  }
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

type TokenStore = Pick<Storage, "getItem" | "setItem">;

/** Loads the anonymous session id from storage, minting one on first visit. */
export function loadSessionId(
  storage: TokenStore,
  randomBytes: (n: number) => Uint8Array,
): string {
  const existing = storage.getItem(SESSION_KEY);
  if (existing !== null && /^[0-9a-f]{32}$/.test(existing)) {
    return existing;
  }
  const token = newSessionToken(randomBytes);
  storage.setItem(SESSION_KEY, token);
  return token;
}

export interface TypeaheadSink<T> {
  /** Results for the query the box currently holds. */
  results(query: string, items: T[]): void;
  /** The request for the current query failed; offer a retry. */
  failure(query: string, error: Error): void;
  /** The box is empty; show nothing and request nothing. */
  cleared(): void;
}

/** Serialises typeahead traffic: at most one request in flight, repeats of
 *  the in-flight query are not re-issued, and responses for text the user
 *  has already replaced are dropped. */
export class TypeaheadController<T> {
  private current = "";
  private inFlight: string | null = null;

  constructor(
    private readonly search: (query: string) => Promise<T[]>,
    private readonly sink: TypeaheadSink<T>,
  ) {}

  setQuery(raw: string): void {
    this.current = raw.trim();
    if (this.current === "") {
      this.sink.cleared();
      return;
    }
    this.launchIfIdle();
  }

  /** Re-issues the current query after a failure. */
  retry(): void {
    this.launchIfIdle();
  }

  private launchIfIdle(): void {
    if (this.current === "" || this.inFlight !== null) {
      return;
    }
    const query = this.current;
    this.inFlight = query;
    this.search(query).then(
      (items) => this.settle(query, () => this.sink.results(query, items)),
      (error: unknown) =>
        this.settle(query, () =>
          this.sink.failure(query, error instanceof Error ? error : new Error(String(error))),
        ),
    );
  }

  private settle(query: string, deliver: () => void): void {
    this.inFlight = null;
    if (query === this.current) {
      deliver();
    } else {
      // the text changed while this request was out; chase the newest query
      this.launchIfIdle();
    }
  }
}

export type SubmitStatus =
  | { kind: "idle" }
  | { kind: "sending" }
  | { kind: "accepted"; seq: number }
  | { kind: "rejected"; message: string; fields: string[] };

/** Everything the page tracks between events. */
export interface UiState {
  sessionId: string;
  query: string;
  suggestions: CourseSummary[];
  searchError: string | null;
  panels: ExploreResponse | null;
  panelsError: string | null;
  courseDrafts: Map<string, CourseDraft>;
  listDrafts: Record<Panel, ListDraft>;
  submits: Map<string, SubmitStatus>;
}

export function initialState(sessionId: string): UiState {
  return {
    sessionId,
    query: "",
    suggestions: [],
    searchError: null,
    panels: null,
    panelsError: null,
    courseDrafts: new Map(),
    listDrafts: { within: emptyListDraft(), across: emptyListDraft() },
    submits: new Map(),
  };
}

export function draftKey(panel: Panel, courseId: string): string {
  return `${panel}:${courseId}`;
}

export function courseDraft(state: UiState, panel: Panel, courseId: string): CourseDraft {
  const key = draftKey(panel, courseId);
  let draft = state.courseDrafts.get(key);
  if (draft === undefined) {
    draft = emptyCourseDraft();
    state.courseDrafts.set(key, draft);
  }
  return draft;
}

export function submitStatus(state: UiState, panel: Panel, courseId: string): SubmitStatus {
  return state.submits.get(draftKey(panel, courseId)) ?? { kind: "idle" };
}

/** Fresh drafts and statuses for a newly selected favorite. */
export function resetForFavorite(state: UiState, panels: ExploreResponse): void {
  state.panels = panels;
  state.panelsError = null;
  state.courseDrafts = new Map();
  state.submits = new Map();
  state.listDrafts = { within: emptyListDraft(), across: emptyListDraft() };
}
