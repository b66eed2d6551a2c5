// Typed client for the course recommendation service. The page talks to
// exactly five routes: /health, /api/courses, /api/models, /api/explore,
// and /api/ratings. Nothing else on the network.

export interface CourseSummary {
  id: string;
  department: string;
  number: string;
  title: string;
}

export interface CourseDetail extends CourseSummary {
  description: string;
}

export interface PanelEntry extends CourseDetail {
  score: number;
  rank: number;
}

export interface ExploreResponse {
  favorite: CourseDetail;
  within_department: PanelEntry[];
  across_departments: PanelEntry[];
  within_reason: string | null;
  across_reason: string | null;
}

export interface ModelInfo {
  label: string;
  dim: number;
  n_courses: number;
  role: string | null;
}

export interface RatingPayload {
  session_id: string;
  favorite: string;
  rated_course: string;
  panel: "within" | "across";
  unexpectedness: number;
  interest: number;
  novelty: number;
  list_diversity?: number;
  list_commonality?: number;
  commonality_text?: string;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Error body the service attaches to non-2xx responses. */
interface ErrorEnvelope {
  error?: {
    code?: string;
    message?: string;
    fields?: string[];
  };
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly fields: string[] = [],
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    // bound wrapper: bare window.fetch throws on indirect invocation
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  async health(): Promise<{ status: string }> {
    return (await this.request("/health")) as { status: string };
  }

  async models(): Promise<ModelInfo[]> {
    return (await this.request("/api/models")) as ModelInfo[];
  }

  async searchCourses(query: string, limit = 10): Promise<CourseSummary[]> {
    const params = new URLSearchParams({ q: query, limit: String(limit) });
    return (await this.request(`/api/courses?${params}`)) as CourseSummary[];
  }

  async explore(courseId: string): Promise<ExploreResponse> {
    const params = new URLSearchParams({ course_id: courseId });
    return (await this.request(`/api/explore?${params}`)) as ExploreResponse;
  }

  async submitRating(payload: RatingPayload): Promise<{ seq: number }> {
    return (await this.request("/api/ratings", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    })) as { seq: number };
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      const detail = (body as ErrorEnvelope | null)?.error;
      throw new ApiError(
        response.status,
        detail?.code ?? "http_error",
        detail?.message ?? `request failed with status ${response.status}`,
        detail?.fields ?? [],
      );
    }
    return body;
  }
}
