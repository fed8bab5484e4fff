// Typed client for the waypost REST API. All state changes go through here.

export interface Session {
  user_id: string;
  pseudonym: string;
  token: string;
}

export interface Suggestion {
  label: string;
  kind: "venue" | "address";
  lat: number;
  lng: number;
  rank_score: number;
}

export interface JourneyInfo {
  journey_id: string;
  origin: { lat: number; lng: number };
  destination: { lat: number; lng: number };
  origin_label: string;
  destination_label: string;
  length_m: number;
  created_at: string;
}

export interface NoteView {
  note_id: string;
  display_author: string;
  mode_avatar: string;
  category: string;
  color_tag: string;
  text: string;
  created_at: string;
  comment_count: number;
}

export interface CommentView {
  comment_id: string;
  display_author: string;
  text: string;
  created_at: string;
}

export interface CheckinResponse {
  checkin_id: string;
  trailblazer: boolean;
  welcome: { kind: string; text: string };
  journey: JourneyInfo;
  feed: NoteView[];
}

export interface CurrentCheckin {
  checkin_id: string;
  journey_id: string;
  mode: string;
  trailblazer: boolean;
  created_at: string;
  journey: JourneyInfo;
}

export interface JourneyCard {
  journey_id: string;
  origin_label: string;
  destination_label: string;
  mode_counts: Record<string, number>;
  last_checkin_at: string;
}

export interface ModeTotals {
  count: number;
  distance_m: number;
  distance_display: string;
}

export interface CheckinRequest {
  origin?: { lat: number; lng: number; label?: string };
  destination?: { lat: number; lng: number; label?: string };
  previous_journey_id?: string;
  mode: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type Fetcher = typeof fetch;

export class WaypostClient {
  private token: string | null = null;

  constructor(
    private readonly base: string = "",
    private readonly fetcher: Fetcher = fetch.bind(globalThis),
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    let response: Response;
    try {
      response = await this.fetcher(this.base + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, "unreachable", String(err));
    }
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const error = (payload as { error?: { code?: string; message?: string } }).error;
      throw new ApiError(response.status, error?.code ?? "error", error?.message ?? "request failed");
    }
    return payload as T;
  }

  register(): Promise<Session & { created_at: string }> {
    return this.call("POST", "/users");
  }

  suggest(q: string, lat: number, lng: number): Promise<{ suggestions: Suggestion[]; degraded: string[] }> {
    const params = new URLSearchParams({ q, lat: String(lat), lng: String(lng) });
    return this.call("GET", `/suggest?${params}`);
  }

  checkIn(request: CheckinRequest): Promise<CheckinResponse> {
    return this.call("POST", "/checkins", request);
  }

  currentCheckin(): Promise<CurrentCheckin> {
    return this.call("GET", "/me/current");
  }

  journeyHistory(): Promise<{ journeys: JourneyCard[] }> {
    return this.call("GET", "/me/journeys");
  }

  stats(): Promise<{ total_checkins: number; modes: Record<string, ModeTotals> }> {
    return this.call("GET", "/me/stats");
  }

  feed(): Promise<{ journey_id: string; notes: NoteView[] }> {
    return this.call("GET", "/journey/feed");
  }

  composeNote(text: string, category: string, anonymous: boolean): Promise<NoteView> {
    return this.call("POST", "/notes", { text, category, anonymous });
  }

  noteDetail(noteId: string): Promise<{ note: NoteView; comments: CommentView[] }> {
    return this.call("GET", `/notes/${encodeURIComponent(noteId)}`);
  }

  addComment(noteId: string, text: string, anonymous: boolean): Promise<CommentView> {
    return this.call("POST", `/notes/${encodeURIComponent(noteId)}/comments`, { text, anonymous });
  }
}
