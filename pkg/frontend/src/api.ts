/** Typed client for the survey service API. */

export const EMOTIONS = ["sadness", "joy", "love", "anger", "fear", "surprise"] as const;
export type Emotion = (typeof EMOTIONS)[number];

export interface GroupSummary {
  group_id: number;
  size: number;
  dominant: string;
}

export interface GroupMember {
  meme_id: string;
  image_url: string;
  text: string;
}

export interface GroupDetail {
  group_id: number;
  members: GroupMember[];
  dominant: string;
  histogram: Record<string, number>;
}

export interface AgreementStats {
  per_group: Record<string, number>;
  average: number;
  n_groups: number;
  n_participants: number;
  n_responses: number;
}

export interface SurveyAnswer {
  participant_id: string;
  group_id: number;
  similar: boolean;
  emotion?: Emotion;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export type PostOutcome = "stored" | "duplicate";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new ApiError(`GET ${path} failed`, response.status);
    }
    return (await response.json()) as T;
  }

  groups(): Promise<GroupSummary[]> {
    return this.getJson<GroupSummary[]>("/api/groups");
  }

  groupDetail(groupId: number): Promise<GroupDetail> {
    return this.getJson<GroupDetail>(`/api/groups/${groupId}`);
  }

  agreementStats(): Promise<AgreementStats> {
    return this.getJson<AgreementStats>("/api/stats/agreement");
  }

  /**
   * Store one answer.  A 409 means this participant already answered the
   * group (for example after a refresh or a double click); the server kept
   * exactly one copy, so callers treat it as success.
   */
  async postResponse(answer: SurveyAnswer): Promise<PostOutcome> {
    const response = await this.fetchFn(this.baseUrl + "/api/responses", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(answer),
    });
    if (response.status === 409) {
      return "duplicate";
    }
    if (!response.ok) {
      throw new ApiError(`POST /api/responses failed`, response.status);
    }
    return "stored";
  }
}
