// Screen state and the pure transitions behind the compose popover and feed.

import type { CheckinResponse, NoteView, Session } from "./api.js";

export const NOTE_MAX_CHARS = 250;

// Fixed cycle order for the compose sub-header taps.
export const CATEGORY_CYCLE = [
  "notes-and-visitors",
  "secrets-and-stories",
  "love-and-hate",
  "missed-connections",
  "tips-and-tricks",
] as const;

export type Category = (typeof CATEGORY_CYCLE)[number];

export const CATEGORY_TITLES: Record<Category, string> = {
  "notes-and-visitors": "Notes & Visitors",
  "secrets-and-stories": "Secrets & Stories",
  "love-and-hate": "Love & Hate",
  "missed-connections": "Missed Connections",
  "tips-and-tricks": "Tips & Tricks",
};

export const MODES = [
  "car", "bus", "train", "airplane", "walk", "bicycle",
  "ferry", "motorcycle", "skateboard", "horse", "wheelchair", "rocket",
] as const;

export const MODE_ICONS: Record<string, string> = {
  car: "\u{1F697}",
  bus: "\u{1F68C}",
  train: "\u{1F686}",
  airplane: "✈️",
  walk: "\u{1F6B6}",
  bicycle: "\u{1F6B2}",
  ferry: "⛴️",
  motorcycle: "\u{1F3CD}️",
  skateboard: "\u{1F6F9}",
  horse: "\u{1F40E}",
  wheelchair: "\u{1F9BD}",
  rocket: "\u{1F680}",
};

export interface ComposeState {
  text: string;
  category: Category;
  anonymous: boolean;
}

export interface ScreenState {
  route: "home" | "journey";
  session: Session | null;
  checkin: CheckinResponse | null; // current check-in, set by the check-in flow
  feed: NoteView[];
  compose: ComposeState | null; // non-null while the popover is open
  welcomeSeenFor: string | null; // checkin_id whose welcome pop-up was shown
}

export function initialState(): ScreenState {
  return {
    route: "home",
    session: null,
    checkin: null,
    feed: [],
    compose: null,
    welcomeSeenFor: null,
  };
}

// Character counting matches the server: Unicode code points, trailing
// whitespace not counted against the writer.
export function charCount(text: string): number {
  return [...text.replace(/\s+$/u, "")].length;
}

export interface CounterView {
  count: number;
  remaining: number;
  over: boolean;
  submittable: boolean;
}

export function counterView(text: string): CounterView {
  const count = charCount(text);
  return {
    count,
    remaining: NOTE_MAX_CHARS - count,
    over: count > NOTE_MAX_CHARS,
    submittable: count >= 1 && count <= NOTE_MAX_CHARS,
  };
}

export function nextCategory(category: Category): Category {
  const index = CATEGORY_CYCLE.indexOf(category);
  const next = CATEGORY_CYCLE[(index + 1) % CATEGORY_CYCLE.length];
  return next ?? CATEGORY_CYCLE[0];
}

export function openCompose(): ComposeState {
  return { text: "", category: CATEGORY_CYCLE[0], anonymous: false };
}

// What the author will see in the feed the moment they submit, before the
// server answers. An anonymous note must never show the session pseudonym.
export function optimisticNote(
  compose: ComposeState,
  session: Session,
  mode: string,
  provisionalId: string,
): NoteView {
  return {
    note_id: provisionalId,
    display_author: compose.anonymous ? "anonymous" : session.pseudonym,
    mode_avatar: `avatar-${mode}`,
    category: compose.category,
    color_tag: colorTag(compose.category),
    text: compose.text.replace(/\s+$/u, ""),
    created_at: new Date().toISOString(),
    comment_count: 0,
  };
}

export function prependNote(feed: NoteView[], note: NoteView): NoteView[] {
  return [note, ...feed];
}

export function replaceNote(feed: NoteView[], provisionalId: string, note: NoteView): NoteView[] {
  return feed.map((n) => (n.note_id === provisionalId ? note : n));
}

export function rollbackNote(feed: NoteView[], provisionalId: string): NoteView[] {
  return feed.filter((n) => n.note_id !== provisionalId);
}

const COLOR_TAGS: Record<Category, string> = {
  "notes-and-visitors": "sky",
  "secrets-and-stories": "violet",
  "love-and-hate": "rose",
  "missed-connections": "amber",
  "tips-and-tricks": "moss",
};

export function colorTag(category: Category): string {
  return COLOR_TAGS[category];
}

// The welcome pop-up shows exactly once per check-in.
export function shouldShowWelcome(state: ScreenState): boolean {
  return state.checkin !== null && state.welcomeSeenFor !== state.checkin.checkin_id;
}
