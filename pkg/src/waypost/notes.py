"""Composing notes, the community feed, note detail, and comments.

Notes belong to a journey. What a reader can see is decided at read time
against the reader's current journey: the feed covers every journey bundled
into its community, and nothing outside it — a note that isn't visible is
indistinguishable from one that doesn't exist.
"""

from __future__ import annotations

from .errors import NotFoundError, StateError, ValidationError
from .geo import CommunityConfig, community_query
from .models import (
    ANONYMOUS_AUTHOR,
    Checkin,
    Comment,
    CommentView,
    DEFAULT_CATEGORY,
    Note,
    NoteCategory,
    NOTE_MAX_CHARS,
    NoteView,
)
from .store import Store


def validate_note_text(text: str) -> str:
    """Trim trailing whitespace; the rest must be 1..250 characters."""
    if not isinstance(text, str):
        raise ValidationError("note text must be a string")
    trimmed = text.rstrip()
    if not trimmed:
        raise ValidationError("note text is empty")
    if len(trimmed) > NOTE_MAX_CHARS:
        raise ValidationError(
            f"note text is {len(trimmed)} characters; the limit is {NOTE_MAX_CHARS}"
        )
    return trimmed


def _parse_category(category: NoteCategory | str | None) -> NoteCategory:
    if category is None or category == "":
        return DEFAULT_CATEGORY
    if isinstance(category, NoteCategory):
        return category
    return NoteCategory.parse(category)


def _require_current_checkin(store: Store, user_id: str) -> Checkin:
    current = store.current_checkin(user_id)
    if current is None:
        raise StateError("check in to a journey first", code="no_current_checkin")
    return current


def compose_note(
    store: Store,
    user_id: str,
    text: str,
    *,
    category: NoteCategory | str | None = None,
    anonymous: bool = False,
) -> Note:
    """Leave a note on the user's current journey, tagged with the check-in's mode."""
    current = _require_current_checkin(store, user_id)
    trimmed = validate_note_text(text)
    parsed_category = _parse_category(category)
    with store.write() as txn:
        return txn.new_note(
            journey_id=current.journey_id,
            author_user_id=user_id,
            anonymous=anonymous,
            category=parsed_category,
            text=trimmed,
            mode=current.mode,
        )


def note_view(store: Store, note: Note) -> NoteView:
    if note.anonymous:
        display_author = ANONYMOUS_AUTHOR
    else:
        display_author = store.get_user(note.author_user_id).pseudonym
    return NoteView(
        note_id=note.note_id,
        display_author=display_author,
        mode_avatar=note.mode.avatar,
        category=note.category,
        color_tag=note.category.color_tag,
        text=note.text,
        created_at=note.created_at,
        comment_count=store.comment_count(note.note_id),
    )


def comment_view(store: Store, comment: Comment) -> CommentView:
    if comment.anonymous:
        display_author = ANONYMOUS_AUTHOR
    else:
        display_author = store.get_user(comment.author_user_id).pseudonym
    return CommentView(
        comment_id=comment.comment_id,
        display_author=display_author,
        text=comment.text,
        created_at=comment.created_at,
    )


def _feed_sort_key(note: Note):
    return (note.created_at, _id_sequence(note.note_id), note.note_id)


def _id_sequence(note_id: str) -> int:
    digits = "".join(ch for ch in note_id if ch.isdigit())
    return int(digits) if digits else 0


def journey_feed(
    viewer_checkin: Checkin, store: Store, cfg: CommunityConfig | None = None
) -> list[NoteView]:
    """All notes across the viewer's journey community, newest first."""
    cfg = cfg or CommunityConfig()
    journey = store.get_journey(viewer_checkin.journey_id)
    visible: list[Note] = []
    for journey_id in community_query(journey, store.index, cfg):
        visible.extend(store.notes_on_journey(journey_id))
    visible.sort(key=_feed_sort_key, reverse=True)
    return [note_view(store, note) for note in visible]


def _visible_note(
    store: Store, viewer_checkin: Checkin, note_id: str, cfg: CommunityConfig
) -> Note:
    # The same not-found error whether the note is missing or merely out of
    # range; anything else would leak where notes exist.
    note = store.find_note(note_id)
    if note is not None:
        journey = store.get_journey(viewer_checkin.journey_id)
        if note.journey_id in community_query(journey, store.index, cfg):
            return note
    raise NotFoundError(f"no note {note_id!r} on this journey")


def note_detail(
    viewer_checkin: Checkin,
    note_id: str,
    store: Store,
    cfg: CommunityConfig | None = None,
) -> tuple[NoteView, list[CommentView]]:
    """The note plus its comments, oldest first."""
    cfg = cfg or CommunityConfig()
    note = _visible_note(store, viewer_checkin, note_id, cfg)
    comments = [comment_view(store, c) for c in store.comments_for(note_id)]
    return note_view(store, note), comments


def add_comment(
    store: Store,
    user_id: str,
    note_id: str,
    text: str,
    *,
    anonymous: bool = False,
    cfg: CommunityConfig | None = None,
) -> Comment:
    """Reply to a note that is visible from the user's current journey."""
    cfg = cfg or CommunityConfig()
    current = _require_current_checkin(store, user_id)
    trimmed = validate_note_text(text)
    note = _visible_note(store, current, note_id, cfg)
    with store.write() as txn:
        return txn.new_comment(
            note_id=note.note_id,
            author_user_id=user_id,
            anonymous=anonymous,
            text=trimmed,
        )
