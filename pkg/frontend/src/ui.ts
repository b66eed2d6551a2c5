// DOM construction and event wiring for the Explore page. Everything shown
// comes straight from service payloads; scores and ranks in particular are
// rendered verbatim, never computed here.

import { ApiClient, ApiError } from "./api.js";
import type { CourseDetail, CourseSummary, PanelEntry } from "./api.js";
import {
  COURSE_STATEMENTS,
  LIKERT_MAX,
  LIKERT_MIN,
  LIST_STATEMENTS,
  TypeaheadController,
  buildRatingPayload,
  canSubmit,
  courseDraft,
  draftKey,
  initialState,
  loadSessionId,
  missingStatements,
  resetForFavorite,
  setListStatement,
  setStatement,
  submitStatus,
} from "./state.js";
import type {
  CourseStatement,
  ListStatement,
  Panel,
  SubmitStatus,
  UiState,
} from "./state.js";

export const WITHIN_PANEL_LABEL = "Similar in this department";
export const ACROSS_PANEL_LABEL = "Explore other departments";

export const COURSE_STATEMENT_TEXT: Record<CourseStatement, string> = {
  unexpectedness: "This suggestion was unexpected",
  interest: "I am interested in taking this course",
  novelty: "I did not know about this course before",
};

export const LIST_STATEMENT_TEXT: Record<ListStatement, string> = {
  list_diversity: "The suggestions in this list are diverse",
  list_commonality: "The suggestions in this list share something in common",
};

const SCALE_HINT = "1 = strongly disagree, 5 = strongly agree";

export function emptyPanelText(reason: string | null, panel: Panel): string {
  if (reason !== null) {
    return `Nothing to show: ${reason}.`;
  }
  return panel === "within"
    ? "No other course in this department could be ranked for this favorite."
    : "No course outside this department could be ranked for this favorite.";
}

type Attrs = Record<string, string>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function suggestionLabel(course: CourseSummary): string {
  return `${course.id} · ${course.department} ${course.number} · ${course.title}`;
}

export function mountApp(
  root: HTMLElement,
  client: ApiClient,
  storage: Pick<Storage, "getItem" | "setItem">,
  randomBytes: (n: number) => Uint8Array,
): UiState {
  const state = initialState(loadSessionId(storage, randomBytes));

  const searchInput = el("input", {
    id: "course-search",
    type: "search",
    autocomplete: "off",
    placeholder: "Type a course id, title, or department",
    "aria-label": "Favorite course search",
  });
  const retryButton = el("button", { type: "button", class: "retry" }, "Retry");
  const searchErrorText = el("span", { class: "error-text" });
  const searchError = el("div", { class: "search-error", role: "alert", hidden: "" },
    searchErrorText, retryButton);
  const suggestionList = el("ul", {
    id: "suggestions",
    role: "listbox",
    "aria-label": "Course matches",
  });
  const searchSection = el("section", { class: "search" },
    el("label", { for: "course-search" }, "Favorite course"),
    searchInput, searchError, suggestionList);

  const exploreError = el("div", { class: "explore-error", role: "alert", hidden: "" });
  const favoriteCard = el("section", { id: "favorite-card" });
  const withinSection = el("section", { id: "panel-within", class: "panel" });
  const acrossSection = el("section", { id: "panel-across", class: "panel" });
  const exploreMain = el("main", { id: "explore", hidden: "" },
    favoriteCard, el("div", { class: "panels" }, withinSection, acrossSection));

  root.replaceChildren(
    el("header", {},
      el("h1", {}, "Course Explore"),
      el("p", { class: "tagline" },
        "Pick a favorite course, browse two recommendation panels, and rate the suggestions."),
    ),
    searchSection, exploreError, exploreMain,
  );

  function showSearchError(message: string | null): void {
    state.searchError = message;
    if (message === null) {
      searchError.setAttribute("hidden", "");
      searchErrorText.textContent = "";
    } else {
      searchError.removeAttribute("hidden");
      searchErrorText.textContent = message;
    }
  }

  function renderSuggestions(): void {
    suggestionList.replaceChildren();
    if (state.query !== "" && state.suggestions.length === 0 && state.searchError === null) {
      suggestionList.append(el("li", { class: "no-matches" }, "No matches."));
      return;
    }
    for (const course of state.suggestions) {
      const pick = el("button", { type: "button", class: "suggestion" }, suggestionLabel(course));
      pick.addEventListener("click", () => {
        void selectFavorite(course.id);
      });
      suggestionList.append(el("li", { role: "option" }, pick));
    }
  }

  const typeahead = new TypeaheadController<CourseSummary>(
    (query) => client.searchCourses(query, 8),
    {
      results(query, items) {
        if (query !== state.query) return;
        state.suggestions = items;
        showSearchError(null);
        renderSuggestions();
      },
      failure(query, error) {
        if (query !== state.query) return;
        state.suggestions = [];
        showSearchError(`Search failed: ${error.message}`);
        renderSuggestions();
      },
      cleared() {
        state.suggestions = [];
        showSearchError(null);
        renderSuggestions();
      },
    },
  );

  searchInput.addEventListener("input", () => {
    state.query = searchInput.value.trim();
    typeahead.setQuery(searchInput.value);
  });
  searchInput.addEventListener("keydown", (event) => {
    if (event.key === "ArrowDown" || event.key === "Enter") {
      const first = suggestionList.querySelector("button.suggestion");
      if (first instanceof HTMLButtonElement) {
        event.preventDefault();
        if (event.key === "Enter") first.click();
        else first.focus();
      }
    }
  });
  retryButton.addEventListener("click", () => {
    showSearchError(null);
    typeahead.retry();
  });

  async function selectFavorite(courseId: string): Promise<void> {
    state.suggestions = [];
    renderSuggestions();
    exploreError.setAttribute("hidden", "");
    exploreError.replaceChildren();
    try {
      const panels = await client.explore(courseId);
      resetForFavorite(state, panels);
      renderExplore();
    } catch (error) {
      state.panelsError =
        error instanceof ApiError ? error.message : "network error while loading panels";
      const again = el("button", { type: "button", class: "retry" }, "Retry");
      again.addEventListener("click", () => {
        void selectFavorite(courseId);
      });
      exploreError.replaceChildren(
        el("span", { class: "error-text" }, `Could not load panels: ${state.panelsError}`),
        again,
      );
      exploreError.removeAttribute("hidden");
    }
  }

  function renderFavorite(favorite: CourseDetail): void {
    favoriteCard.replaceChildren(
      el("h2", {}, "Your favorite"),
      el("p", { class: "course-line" },
        el("span", { class: "code" }, `${favorite.department} ${favorite.number}`),
        " ",
        el("span", { class: "title" }, favorite.title),
        el("span", { class: "course-id" }, ` (${favorite.id})`),
      ),
      el("p", { class: "description" }, favorite.description),
    );
  }

  function likertRow(
    name: string,
    text: string,
    picked: number | null,
    disabled: boolean,
    onPick: (value: number) => void,
  ): HTMLElement {
    const group = el("span", { class: "scale", role: "radiogroup", "aria-label": text });
    for (let value = LIKERT_MIN; value <= LIKERT_MAX; value++) {
      const input = el("input", { type: "radio", name, value: String(value) });
      input.checked = picked === value;
      input.disabled = disabled;
      input.addEventListener("change", () => onPick(value));
      group.append(el("label", { class: "likert-choice" }, input, String(value)));
    }
    return el("div", { class: "likert-row" }, el("span", { class: "statement" }, text), group);
  }

  function listRatingBlock(panel: Panel): HTMLElement {
    const block = el("div", { class: "list-ratings" },
      el("p", { class: "list-hint" },
        `About this whole list (optional, sent with each rating). ${SCALE_HINT}.`));
    for (const statement of LIST_STATEMENTS) {
      block.append(
        likertRow(
          `rate-${panel}-list-${statement}`,
          LIST_STATEMENT_TEXT[statement],
          state.listDrafts[panel][statement],
          false,
          (value) => {
            state.listDrafts[panel] = setListStatement(state.listDrafts[panel], statement, value);
          },
        ),
      );
    }
    const remark = el("textarea", {
      class: "commonality-text",
      maxlength: "4000",
      rows: "2",
      placeholder: "If the courses share something in common, describe it here",
      "aria-label": "What the courses share in common",
    });
    remark.value = state.listDrafts[panel].commonality_text;
    remark.addEventListener("input", () => {
      state.listDrafts[panel] = { ...state.listDrafts[panel], commonality_text: remark.value };
    });
    block.append(remark);
    return block;
  }

  function entryItem(panel: Panel, favoriteId: string, entry: PanelEntry): HTMLElement {
    const description = el("p", { class: "description collapsed" }, entry.description);
    const toggle = el("button", { type: "button", class: "toggle", "aria-expanded": "false" },
      "Show more");
    toggle.addEventListener("click", () => {
      const expanded = toggle.getAttribute("aria-expanded") === "true";
      toggle.setAttribute("aria-expanded", String(!expanded));
      description.classList.toggle("collapsed", expanded);
      toggle.textContent = expanded ? "Show more" : "Show less";
    });

    const meta = el("span", {
      class: "meta",
      "data-score": String(entry.score),
      "data-rank": String(entry.rank),
    }, `score ${entry.score.toFixed(4)} · rank ${entry.rank}`);

    const statusLine = el("span", { class: "submit-status", "aria-live": "polite" });
    const submitButton = el("button", { type: "button", class: "submit" }, "Submit rating");
    const hint = el("span", { class: "missing-hint" });
    const radios: HTMLInputElement[] = [];

    function applyStatus(status: SubmitStatus): void {
      state.submits.set(draftKey(panel, entry.id), status);
      const draft = courseDraft(state, panel, entry.id);
      const locked = status.kind === "sending" || status.kind === "accepted";
      submitButton.disabled = locked || !canSubmit(draft);
      for (const radio of radios) radio.disabled = status.kind === "accepted";
      switch (status.kind) {
        case "idle": {
          const missing = missingStatements(draft);
          hint.textContent =
            missing.length === 0 ? "" : `Answer all three statements to submit (${missing.length} left).`;
          statusLine.textContent = "";
          break;
        }
        case "sending":
          hint.textContent = "";
          statusLine.textContent = "Sending…";
          break;
        case "accepted":
          hint.textContent = "";
          statusLine.textContent = `Recorded ✓ (#${status.seq})`;
          statusLine.classList.add("accepted");
          break;
        case "rejected": {
          hint.textContent = "";
          const fieldNote = status.fields.length > 0 ? ` (fields: ${status.fields.join(", ")})` : "";
          statusLine.textContent = `Rejected: ${status.message}${fieldNote}`;
          statusLine.classList.add("rejected");
          break;
        }
      }
      if (status.kind !== "accepted") statusLine.classList.remove("accepted");
      if (status.kind !== "rejected") statusLine.classList.remove("rejected");
    }

    const ratings = el("fieldset", { class: "ratings" },
      el("legend", {}, `Rate this suggestion (${SCALE_HINT})`));
    for (const statement of COURSE_STATEMENTS) {
      const row = likertRow(
        `rate-${panel}-${entry.id}-${statement}`,
        COURSE_STATEMENT_TEXT[statement],
        null,
        false,
        (value) => {
          const updated = setStatement(courseDraft(state, panel, entry.id), statement, value);
          state.courseDrafts.set(draftKey(panel, entry.id), updated);
          applyStatus(submitStatus(state, panel, entry.id));
        },
      );
      radios.push(...row.querySelectorAll("input"));
      ratings.append(row);
    }

    submitButton.addEventListener("click", () => {
      const draft = courseDraft(state, panel, entry.id);
      const status = submitStatus(state, panel, entry.id);
      if (!canSubmit(draft) || status.kind === "sending" || status.kind === "accepted") {
        return;
      }
      applyStatus({ kind: "sending" });
      const payload = buildRatingPayload({
        sessionId: state.sessionId,
        favorite: favoriteId,
        ratedCourse: entry.id,
        panel,
        course: draft,
        list: state.listDrafts[panel],
      });
      client.submitRating(payload).then(
        (ack) => applyStatus({ kind: "accepted", seq: ack.seq }),
        (error: unknown) => {
          if (error instanceof ApiError) {
            applyStatus({ kind: "rejected", message: error.message, fields: error.fields });
          } else {
            applyStatus({ kind: "rejected", message: "network error, please try again", fields: [] });
          }
        },
      );
    });
    ratings.append(submitButton, hint, statusLine);
    applyStatus({ kind: "idle" });

    return el("li", { class: "entry" },
      el("div", { class: "entry-head" },
        el("span", { class: "code" }, `${entry.department} ${entry.number}`),
        " ",
        el("span", { class: "title" }, entry.title),
        meta,
      ),
      description, toggle, ratings,
    );
  }

  function renderPanel(
    section: HTMLElement,
    panel: Panel,
    label: string,
    favoriteId: string,
    entries: PanelEntry[],
    reason: string | null,
  ): void {
    section.replaceChildren(el("h2", {}, label));
    if (entries.length === 0) {
      section.append(el("p", { class: "placeholder" }, emptyPanelText(reason, panel)));
      return;
    }
    const list = el("ol", { class: "entries" });
    for (const entry of entries) {
      list.append(entryItem(panel, favoriteId, entry));
    }
    section.append(list, listRatingBlock(panel));
  }

  function renderExplore(): void {
    const panels = state.panels;
    if (panels === null) return;
    renderFavorite(panels.favorite);
    renderPanel(withinSection, "within", WITHIN_PANEL_LABEL, panels.favorite.id,
      panels.within_department, panels.within_reason);
    renderPanel(acrossSection, "across", ACROSS_PANEL_LABEL, panels.favorite.id,
      panels.across_departments, panels.across_reason);
    exploreMain.removeAttribute("hidden");
  }

  renderSuggestions();
  return state;
}
