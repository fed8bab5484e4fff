// HTML renderers. Pure string-in string-out so they test without a browser;
// main.ts owns the DOM. Every piece of user content passes through escapeHtml.

import type { CheckinResponse, CommentView, JourneyCard, ModeTotals, NoteView } from "./api.js";
import {
  CATEGORY_TITLES,
  type Category,
  type ComposeState,
  counterView,
  MODE_ICONS,
  MODES,
  NOTE_MAX_CHARS,
} from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function modeIcon(modeAvatar: string): string {
  const mode = modeAvatar.replace(/^avatar-/, "");
  return MODE_ICONS[mode] ?? "❓";
}

function when(timestamp: string): string {
  return escapeHtml(timestamp.replace("T", " ").slice(0, 16));
}

export function renderNoteCard(note: NoteView): string {
  return `
  <article class="note color-${escapeHtml(note.color_tag)}" data-note-id="${escapeHtml(note.note_id)}">
    <header>
      <span class="avatar" title="${escapeHtml(note.mode_avatar)}">${modeIcon(note.mode_avatar)}</span>
      <span class="author">${escapeHtml(note.display_author)}</span>
      <span class="category-badge">${escapeHtml(CATEGORY_TITLES[note.category as Category] ?? note.category)}</span>
    </header>
    <p class="note-text">${escapeHtml(note.text)}</p>
    <footer>
      <time>${when(note.created_at)}</time>
      <button class="open-note" data-note-id="${escapeHtml(note.note_id)}">
        ${note.comment_count} comment${note.comment_count === 1 ? "" : "s"}
      </button>
    </footer>
  </article>`;
}

export function renderFeed(notes: NoteView[]): string {
  if (notes.length === 0) {
    return `<p class="empty-feed">No notes here yet. Leave the first one behind.</p>`;
  }
  return notes.map(renderNoteCard).join("\n");
}

export function renderWelcomePopup(checkin: CheckinResponse): string {
  const lines = checkin.welcome.text
    .split("\n")
    .map((line) => `<p class="welcome-line">${escapeHtml(line)}</p>`)
    .join("");
  const badge = checkin.trailblazer
    ? `<p class="trailblazer-badge">Trailblazer! You are the first through here.</p>`
    : "";
  return `
  <div class="popup welcome-popup" data-kind="${escapeHtml(checkin.welcome.kind)}">
    ${badge}${lines}
    <button id="welcome-dismiss">Onward</button>
  </div>`;
}

export function renderJourneyHeader(checkin: CheckinResponse): string {
  const j = checkin.journey;
  return `
  <header class="journey-header">
    <h2>${escapeHtml(j.origin_label)} → ${escapeHtml(j.destination_label)}</h2>
    <p class="length">${(j.length_m / 1000).toFixed(1)} km as the crow flies</p>
    <button id="compose-open">Compose a note</button>
    <button id="back-home">Home</button>
  </header>`;
}

export function renderCompose(compose: ComposeState): string {
  const counter = counterView(compose.text);
  const counterClass = counter.over ? "counter over" : "counter";
  return `
  <div class="popup compose-popover">
    <header>
      <button id="compose-category" class="subheader color-${escapeHtml(colorOf(compose.category))}">
        ${escapeHtml(CATEGORY_TITLES[compose.category])}
      </button>
      <button id="compose-anonymous" class="anon-toggle${compose.anonymous ? " on" : ""}"
              aria-pressed="${compose.anonymous}">
        ${compose.anonymous ? "Anonymous" : `As your pseudonym`}
      </button>
    </header>
    <textarea id="compose-text" placeholder="Leave a note on this journey&#8230;">${escapeHtml(compose.text)}</textarea>
    <footer>
      <span class="${counterClass}">${counter.count}/${NOTE_MAX_CHARS}</span>
      <button id="compose-submit"${counter.submittable ? "" : " disabled"}>Leave it behind</button>
      <button id="compose-cancel">Cancel</button>
    </footer>
  </div>`;
}

function colorOf(category: Category): string {
  // Mirrors the server's category color tags.
  const tags: Record<Category, string> = {
    "notes-and-visitors": "sky",
    "secrets-and-stories": "violet",
    "love-and-hate": "rose",
    "missed-connections": "amber",
    "tips-and-tricks": "moss",
  };
  return tags[category];
}

export function renderModePicker(selected: string | null): string {
  const cells = MODES.map(
    (mode) => `
    <button class="mode-cell${selected === mode ? " selected" : ""}" data-mode="${mode}"
            title="${mode}">${MODE_ICONS[mode]}</button>`,
  ).join("");
  return `<div class="mode-grid">${cells}</div>`;
}

export function renderHistoryCards(cards: JourneyCard[]): string {
  if (cards.length === 0) {
    return `<p class="empty-history">No journeys yet. Where are you headed?</p>`;
  }
  return cards
    .map((card) => {
      const counts = Object.entries(card.mode_counts)
        .map(([mode, n]) => `${MODE_ICONS[mode] ?? mode}×${n}`)
        .join(" ");
      return `
  <button class="journey-card" data-journey-id="${escapeHtml(card.journey_id)}">
    <span class="route">${escapeHtml(card.origin_label)} → ${escapeHtml(card.destination_label)}</span>
    <span class="counts">${escapeHtml(counts)}</span>
  </button>`;
    })
    .join("\n");
}

export function renderStats(total: number, modes: Record<string, ModeTotals>): string {
  const rows = Object.entries(modes)
    .map(
      ([mode, t]) => `
    <tr><td>${MODE_ICONS[mode] ?? ""} ${escapeHtml(mode)}</td>
        <td>${t.count}</td><td>${escapeHtml(t.distance_display)}</td></tr>`,
    )
    .join("");
  return `
  <section class="stats">
    <h3>${total} check-in${total === 1 ? "" : "s"} so far</h3>
    <table><thead><tr><th>mode</th><th>trips</th><th>crow-flies</th></tr></thead>
    <tbody>${rows}</tbody></table>
  </section>`;
}

export function renderNoteDetail(note: NoteView, comments: CommentView[]): string {
  const thread = comments
    .map(
      (c) => `
    <li class="comment">
      <span class="author">${escapeHtml(c.display_author)}</span>
      <p>${escapeHtml(c.text)}</p>
      <time>${when(c.created_at)}</time>
    </li>`,
    )
    .join("");
  return `
  <div class="popup note-detail">
    ${renderNoteCard(note)}
    <ul class="comments">${thread}</ul>
    <textarea id="comment-text" placeholder="Reply to this note&#8230;"></textarea>
    <label class="anon-label"><input type="checkbox" id="comment-anonymous"> anonymous</label>
    <button id="comment-submit">Reply</button>
    <button id="detail-close">Close</button>
  </div>`;
}

export function renderRetryBanner(message: string): string {
  return `
  <div class="banner error">
    <span>${escapeHtml(message)}</span>
    <button id="retry">Retry</button>
  </div>`;
}
