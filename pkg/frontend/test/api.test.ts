import { describe, expect, it } from "vitest";

import { ApiError, WaypostClient } from "../src/api";

function fakeFetch(
  handler: (url: string, init?: RequestInit) => { status: number; body: unknown },
): typeof fetch {
  return (async (url: RequestInfo | URL, init?: RequestInit) => {
    const { status, body } = handler(String(url), init);
    return {
      ok: status >= 200 && status < 300,
      status,
      json: async () => body,
    } as Response;
  }) as typeof fetch;
}

describe("WaypostClient", () => {
  it("sends the bearer token on authenticated calls", async () => {
    let seen: RequestInit | undefined;
    const client = new WaypostClient(
      "",
      fakeFetch((url, init) => {
        seen = init;
        return { status: 200, body: { journey_id: "j1", notes: [] } };
      }),
    );
    client.setToken("tok-123");
    await client.feed();
    expect((seen?.headers as Record<string, string>)["Authorization"]).toBe("Bearer tok-123");
  });

  it("posts note bodies with text, category, anonymous", async () => {
    let sent = "";
    const client = new WaypostClient(
      "",
      fakeFetch((url, init) => {
        sent = String(init?.body);
        return { status: 200, body: {} };
      }),
    );
    await client.composeNote("hello", "tips-and-tricks", true);
    expect(JSON.parse(sent)).toEqual({
      text: "hello",
      category: "tips-and-tricks",
      anonymous: true,
    });
  });

  it("turns error payloads into ApiError with the server's code", async () => {
    const client = new WaypostClient(
      "",
      fakeFetch(() => ({
        status: 409,
        body: { error: { code: "no_current_checkin", message: "check in first" } },
      })),
    );
    const failure = await client.feed().catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(409);
    expect(failure.code).toBe("no_current_checkin");
  });

  it("maps network failure to status 0 / unreachable", async () => {
    const client = new WaypostClient("", (async () => {
      throw new TypeError("fetch failed");
    }) as typeof fetch);
    const failure = await client.register().catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(0);
    expect(failure.code).toBe("unreachable");
  });

  it("encodes suggest query parameters", async () => {
    let seenUrl = "";
    const client = new WaypostClient(
      "",
      fakeFetch((url) => {
        seenUrl = url;
        return { status: 200, body: { suggestions: [], degraded: [] } };
      }),
    );
    await client.suggest("pike place", 47.6, -122.33);
    expect(seenUrl).toContain("/suggest?");
    expect(seenUrl).toContain("q=pike+place");
    expect(seenUrl).toContain("lat=47.6");
  });
});
