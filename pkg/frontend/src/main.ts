// DOM wiring for the two screens. All data flows through the REST client;
// the only client-side state is in `state` below.

import { ApiError, WaypostClient, type Session, type Suggestion } from "./api.js";
import {
  initialState,
  MODES,
  nextCategory,
  openCompose,
  optimisticNote,
  prependNote,
  replaceNote,
  rollbackNote,
  counterView,
  shouldShowWelcome,
  type Category,
  type ScreenState,
} from "./state.js";
import {
  renderCompose,
  renderFeed,
  renderHistoryCards,
  renderJourneyHeader,
  renderModePicker,
  renderNoteDetail,
  renderRetryBanner,
  renderStats,
  renderWelcomePopup,
} from "./render.js";

const client = new WaypostClient("..");
const state: ScreenState = initialState();

const app = () => document.getElementById("app")!;
const overlay = () => document.getElementById("overlay")!;

interface Endpoint {
  lat: number;
  lng: number;
  label: string;
}

let pickedOrigin: Endpoint | null = null;
let pickedDestination: Endpoint | null = null;
let pickedMode: string | null = null;
let provisionalCounter = 0;

async function deviceLocation(): Promise<{ lat: number; lng: number }> {
  // Browser geolocation with a manual fallback for denied permissions.
  const manualLat = (document.getElementById("manual-lat") as HTMLInputElement | null)?.value;
  const manualLng = (document.getElementById("manual-lng") as HTMLInputElement | null)?.value;
  if (manualLat && manualLng) {
    return { lat: parseFloat(manualLat), lng: parseFloat(manualLng) };
  }
  if (!("geolocation" in navigator)) return { lat: 47.6062, lng: -122.3321 };
  return new Promise((resolve) => {
    navigator.geolocation.getCurrentPosition(
      (pos) => resolve({ lat: pos.coords.latitude, lng: pos.coords.longitude }),
      () => resolve({ lat: 47.6062, lng: -122.3321 }),
      { timeout: 8000, maximumAge: 60000 },
    );
  });
}

async function ensureSession(): Promise<Session> {
  const saved = localStorage.getItem("waypost-session");
  if (saved) {
    const session = JSON.parse(saved) as Session;
    client.setToken(session.token);
    return session;
  }
  const created = await client.register();
  const session = { user_id: created.user_id, pseudonym: created.pseudonym, token: created.token };
  localStorage.setItem("waypost-session", JSON.stringify(session));
  client.setToken(session.token);
  return session;
}

function showOverlay(html: string): void {
  overlay().innerHTML = html;
  overlay().hidden = false;
}

function hideOverlay(): void {
  overlay().hidden = true;
  overlay().innerHTML = "";
}

async function showHome(): Promise<void> {
  state.route = "home";
  let history = "";
  let current = "";
  let stats = "";
  try {
    const cards = await client.journeyHistory();
    history = renderHistoryCards(cards.journeys);
    const totals = await client.stats();
    stats = renderStats(totals.total_checkins, totals.modes);
    if (state.checkin) {
      const j = state.checkin.journey;
      current = `
      <section class="current-journey">
        <h3>Current journey</h3>
        <button id="return-current" class="journey-card">
          <span class="route">${j.origin_label} → ${j.destination_label}</span>
        </button>
      </section>`;
    }
  } catch (err) {
    app().innerHTML = renderRetryBanner("Can't reach the service.");
    document.getElementById("retry")?.addEventListener("click", () => void showHome());
    return;
  }

  app().innerHTML = `
  <h1>Waypost</h1>
  <p class="pseudonym-line">Travelling as <strong>${state.session?.pseudonym ?? ""}</strong></p>
  ${current}
  <section class="new-journey">
    <h3>New journey</h3>
    <input id="origin-input" placeholder="From (venue or address)" autocomplete="off">
    <div id="origin-suggestions" class="suggestions"></div>
    <input id="destination-input" placeholder="To" autocomplete="off">
    <div id="destination-suggestions" class="suggestions"></div>
    <details class="manual-location">
      <summary>No location access? Enter coordinates</summary>
      <input id="manual-lat" placeholder="latitude"> <input id="manual-lng" placeholder="longitude">
    </details>
    <h4>Mode of travel</h4>
    <div id="mode-picker">${renderModePicker(pickedMode)}</div>
    <button id="checkin-submit" disabled>Check in</button>
  </section>
  <section class="history">
    <h3>Previous journeys</h3>
    ${history}
  </section>
  ${stats}`;

  wireHome();
}

function wireHome(): void {
  wireTypeahead("origin-input", "origin-suggestions", (s) => {
    pickedOrigin = s;
    refreshCheckinButton();
  });
  wireTypeahead("destination-input", "destination-suggestions", (s) => {
    pickedDestination = s;
    refreshCheckinButton();
  });

  document.getElementById("mode-picker")?.addEventListener("click", (event) => {
    const cell = (event.target as HTMLElement).closest<HTMLElement>(".mode-cell");
    if (!cell) return;
    pickedMode = cell.dataset.mode ?? null;
    document.getElementById("mode-picker")!.innerHTML = renderModePicker(pickedMode);
    refreshCheckinButton();
  });

  document.getElementById("checkin-submit")?.addEventListener("click", () => {
    if (pickedOrigin && pickedDestination && pickedMode) {
      void doCheckin({
        origin: { lat: pickedOrigin.lat, lng: pickedOrigin.lng, label: pickedOrigin.label },
        destination: {
          lat: pickedDestination.lat,
          lng: pickedDestination.lng,
          label: pickedDestination.label,
        },
        mode: pickedMode,
      });
    }
  });

  document.querySelectorAll<HTMLElement>(".journey-card[data-journey-id]").forEach((card) => {
    card.addEventListener("click", () => {
      const journeyId = card.dataset.journeyId!;
      askModeThen((mode) => void doCheckin({ previous_journey_id: journeyId, mode }));
    });
  });

  document.getElementById("return-current")?.addEventListener("click", () => {
    void showJourney();
  });
}

function refreshCheckinButton(): void {
  const ready = Boolean(pickedOrigin && pickedDestination && pickedMode);
  (document.getElementById("checkin-submit") as HTMLButtonElement | null)?.toggleAttribute(
    "disabled",
    !ready,
  );
}

function wireTypeahead(
  inputId: string,
  boxId: string,
  onPick: (endpoint: Endpoint) => void,
): void {
  const input = document.getElementById(inputId) as HTMLInputElement | null;
  const box = document.getElementById(boxId);
  if (!input || !box) return;
  let timer: number | undefined;
  input.addEventListener("input", () => {
    window.clearTimeout(timer);
    timer = window.setTimeout(async () => {
      const query = input.value.trim();
      if (!query) {
        box.innerHTML = "";
        return;
      }
      const here = await deviceLocation();
      try {
        const result = await client.suggest(query, here.lat, here.lng);
        box.innerHTML = result.suggestions
          .slice(0, 6)
          .map(
            (s, i) =>
              `<button class="suggestion" data-index="${i}">${s.kind === "venue" ? "\u{1F4CD}" : "\u{1F3E0}"} ${s.label}</button>`,
          )
          .join("");
        box.querySelectorAll<HTMLElement>(".suggestion").forEach((el) => {
          el.addEventListener("click", () => {
            const s: Suggestion = result.suggestions[Number(el.dataset.index)]!;
            input.value = s.label;
            box.innerHTML = "";
            onPick({ lat: s.lat, lng: s.lng, label: s.label });
          });
        });
      } catch {
        box.innerHTML = "";
      }
    }, 200);
  });
}

function askModeThen(go: (mode: string) => void): void {
  showOverlay(`
  <div class="popup mode-popup">
    <h3>How are you travelling?</h3>
    ${renderModePicker(null)}
  </div>`);
  const handler = (event: Event) => {
    const cell = (event.target as HTMLElement).closest<HTMLElement>(".mode-cell");
    if (!cell) return;
    overlay().removeEventListener("click", handler);
    hideOverlay();
    go(cell.dataset.mode ?? MODES[0]);
  };
  overlay().addEventListener("click", handler);
}

async function doCheckin(request: Parameters<WaypostClient["checkIn"]>[0]): Promise<void> {
  try {
    state.checkin = await client.checkIn(request);
    state.feed = state.checkin.feed;
    currentMode = request.mode;
    pickedOrigin = pickedDestination = null;
    pickedMode = null;
    await showJourney();
  } catch (err) {
    if (err instanceof ApiError && err.status === 0) {
      app().innerHTML = renderRetryBanner("Can't reach the service.");
      document.getElementById("retry")?.addEventListener("click", () => void showHome());
    } else {
      alert(err instanceof Error ? err.message : String(err));
    }
  }
}

async function showJourney(): Promise<void> {
  if (!state.checkin) {
    await showHome();
    return;
  }
  state.route = "journey";
  app().innerHTML = `
  ${renderJourneyHeader(state.checkin)}
  <section id="feed">${renderFeed(state.feed)}</section>`;

  if (shouldShowWelcome(state)) {
    showOverlay(renderWelcomePopup(state.checkin));
    state.welcomeSeenFor = state.checkin.checkin_id;
    document.getElementById("welcome-dismiss")?.addEventListener("click", hideOverlay);
  }

  document.getElementById("compose-open")?.addEventListener("click", () => {
    state.compose = openCompose();
    paintCompose();
  });
  document.getElementById("back-home")?.addEventListener("click", () => void showHome());
  wireFeedClicks();
}

function wireFeedClicks(): void {
  document.querySelectorAll<HTMLElement>(".open-note").forEach((el) => {
    el.addEventListener("click", () => void showDetail(el.dataset.noteId!));
  });
}

function paintFeed(): void {
  const feedEl = document.getElementById("feed");
  if (feedEl) {
    feedEl.innerHTML = renderFeed(state.feed);
    wireFeedClicks();
  }
}

function paintCompose(): void {
  if (!state.compose) {
    hideOverlay();
    return;
  }
  showOverlay(renderCompose(state.compose));

  const textarea = document.getElementById("compose-text") as HTMLTextAreaElement;
  textarea.focus();
  textarea.setSelectionRange(textarea.value.length, textarea.value.length);
  textarea.addEventListener("input", () => {
    state.compose!.text = textarea.value;
    const counter = counterView(textarea.value);
    const counterEl = overlay().querySelector(".counter")!;
    counterEl.textContent = `${counter.count}/250`;
    counterEl.className = counter.over ? "counter over" : "counter";
    (document.getElementById("compose-submit") as HTMLButtonElement).disabled =
      !counter.submittable;
  });

  document.getElementById("compose-category")?.addEventListener("click", () => {
    state.compose!.category = nextCategory(state.compose!.category);
    paintCompose();
  });
  document.getElementById("compose-anonymous")?.addEventListener("click", () => {
    state.compose!.anonymous = !state.compose!.anonymous;
    paintCompose();
  });
  document.getElementById("compose-cancel")?.addEventListener("click", () => {
    state.compose = null;
    hideOverlay();
  });
  document.getElementById("compose-submit")?.addEventListener("click", () => void submitNote());
}

async function submitNote(): Promise<void> {
  if (!state.compose || !state.session || !state.checkin) return;
  const compose = state.compose;
  if (!counterView(compose.text).submittable) return;

  // Optimistic prepend, rolled back if the server refuses the note.
  const provisionalId = `pending-${++provisionalCounter}`;
  const preview = optimisticNote(compose, state.session, currentMode, provisionalId);
  state.feed = prependNote(state.feed, preview);
  state.compose = null;
  hideOverlay();
  paintFeed();

  try {
    const saved = await client.composeNote(compose.text, compose.category, compose.anonymous);
    state.feed = replaceNote(state.feed, provisionalId, saved);
  } catch (err) {
    state.feed = rollbackNote(state.feed, provisionalId);
    alert(err instanceof Error ? err.message : String(err));
  }
  paintFeed();
}

// Mode of the current check-in; used for the optimistic preview's avatar.
let currentMode = "walk";

async function showDetail(noteId: string): Promise<void> {
  try {
    const detail = await client.noteDetail(noteId);
    showOverlay(renderNoteDetail(detail.note, detail.comments));
    document.getElementById("detail-close")?.addEventListener("click", hideOverlay);
    document.getElementById("comment-submit")?.addEventListener("click", async () => {
      const text = (document.getElementById("comment-text") as HTMLTextAreaElement).value;
      const anonymous = (document.getElementById("comment-anonymous") as HTMLInputElement).checked;
      if (!counterView(text).submittable) return;
      await client.addComment(noteId, text, anonymous);
      const refreshed = await client.feed();
      state.feed = refreshed.notes;
      await showDetail(noteId);
    });
  } catch (err) {
    alert(err instanceof Error ? err.message : String(err));
  }
}

async function boot(): Promise<void> {
  try {
    state.session = await ensureSession();
  } catch {
    app().innerHTML = renderRetryBanner("Can't reach the service.");
    document.getElementById("retry")?.addEventListener("click", () => void boot());
    return;
  }
  try {
    const current = await client.currentCheckin();
    currentMode = current.mode;
    const feed = await client.feed();
    state.checkin = {
      checkin_id: current.checkin_id,
      trailblazer: current.trailblazer,
      welcome: { kind: "stats", text: "" },
      journey: current.journey,
      feed: feed.notes,
    };
    state.feed = feed.notes;
    state.welcomeSeenFor = current.checkin_id; // welcome was shown when it happened
  } catch {
    // no current check-in; the home screen handles it
  }
  await showHome();
}

void boot();
