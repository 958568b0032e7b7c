"""Per-frame contact/AU/emotion signals and the filter expression language.

A FilterSignal is the universal currency between evaluation, analytics and
the service: one value per session frame plus a validity mask. Validity is
monotone through every combinator: a frame invalid in any operand stays
invalid in the result, and invalid samples always carry value 0.

Expression grammar (precedence ! > & > |, parentheses allowed):

    expr      = or
    or        = and ( "|" and )*
    and       = unary ( "&" unary )*
    unary     = "!" unary | atom
    atom      = "(" expr ")" | call
    call      = face(P) | eye(P) | face_score(P) | eye_score(P)
              | au(P, AUnn, c|r [, thr]) | emotion(P, name)
              | mutual(e, e) | smooth(e [, gap [, min]]) | thresh(e, t)

face/eye/au/emotion/mutual/smooth produce boolean signals; face_score and
eye_score produce continuous scores in [0, 1]. "&" of two continuous
signals is the pointwise minimum; thresh() bridges continuous to boolean.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

import numpy as np

from .config import EmotionTable, FilterConfig
from .errors import (
    ExprSyntaxError,
    ExprTypeError,
    LengthMismatch,
    UnknownAU,
    UnknownEmotion,
    UnknownParticipant,
)
from .geometry import (
    LEFT_EYE_IDX,
    RIGHT_EYE_IDX,
    contact_score,
    eye_polygons,
    face_polygon,
    points_in_hulls,
)
from .sync import SyncedSession

BOOLEAN = "boolean"
CONTINUOUS = "continuous"


@dataclass(frozen=True, eq=False)
class FilterSignal:
    """Named per-frame signal with validity mask."""

    name: str
    kind: str  # BOOLEAN or CONTINUOUS
    values: np.ndarray = field(repr=False)
    valid: np.ndarray = field(repr=False)

    def __post_init__(self):
        valid = np.asarray(self.valid, dtype=bool)
        raw = np.asarray(self.values)
        if raw.shape != valid.shape:
            raise LengthMismatch("values and valid must have equal length")
        if self.kind == BOOLEAN:
            values = raw.astype(bool) & valid
        else:
            values = np.where(valid, raw.astype(float), 0.0)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid", valid)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def frame_count(self) -> int:
        return len(self.values)

    def renamed(self, name: str) -> "FilterSignal":
        return FilterSignal(name, self.kind, self.values, self.valid)


def _require_boolean(sig: FilterSignal, op: str) -> None:
    if sig.kind != BOOLEAN:
        raise ExprTypeError(f"{op} requires a boolean signal, got {sig.kind}")


def _require_same_length(a: FilterSignal, b: FilterSignal) -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"signal lengths differ: {len(a)} vs {len(b)}")


# -- session data ------------------------------------------------------------

class _SessionData:
    """Numpy views over a SyncedSession, built lazily per participant."""

    def __init__(self, session: SyncedSession):
        self.session = session
        self._cache: dict[str, dict] = {}

    def arrays(self, participant: str) -> dict:
        if participant not in self.session.frames:
            raise UnknownParticipant(
                f"unknown participant {participant!r}; session has {list(self.session.frames)}"
            )
        if participant not in self._cache:
            frames = self.session.frames[participant]
            n = len(frames)
            gaze = np.full((n, 2), np.nan)
            gaze_valid = np.zeros(n, dtype=bool)
            face_ok = np.zeros(n, dtype=bool)
            landmarks = np.full((n, 68, 2), np.nan)
            for i, f in enumerate(frames):
                if f.gaze_valid:
                    gaze[i] = f.gaze_px
                    gaze_valid[i] = True
                if f.face is not None and f.face.success:
                    face_ok[i] = True
                    landmarks[i] = f.face.landmarks
            self._cache[participant] = {
                "gaze": gaze,
                "gaze_valid": gaze_valid,
                "face_ok": face_ok,
                "landmarks": landmarks,
                "frames": frames,
            }
        return self._cache[participant]

    def partner_faces_of(self, participant: str) -> dict:
        """Arrays holding `participant`'s own face (seen by the partner)."""
        try:
            partner = self.session.partner_of(participant)
        except KeyError:
            raise UnknownParticipant(
                f"unknown participant {participant!r}; session has {list(self.session.frames)}"
            ) from None
        return self.arrays(partner)


def _scaled_eye_sets(landmarks: np.ndarray, margin: float):
    """Eyelid point sets dilated about their mean, per frame."""
    out = []
    for idx in (LEFT_EYE_IDX, RIGHT_EYE_IDX):
        pts = landmarks[:, idx, :]
        c = pts.mean(axis=1, keepdims=True)
        out.append(c + margin * (pts - c))
    return out[0], out[1]


# -- primitive evaluators ------------------------------------------------------

def _contact_signal(
    data: _SessionData,
    participant: str,
    region: str,
    threshold: float,
    margin: float,
    d_max: float,
    name: str,
    continuous: bool = False,
) -> FilterSignal:
    arr = data.arrays(participant)
    valid = arr["gaze_valid"] & arr["face_ok"]
    n = len(valid)

    if continuous or threshold < 1.0:
        # distance-based path: per-frame hulls and contact scores
        scores = np.zeros(n)
        for i in np.flatnonzero(valid):
            face = arr["frames"][i].face
            p = arr["gaze"][i]
            if region == "face":
                scores[i] = contact_score(p, face_polygon(face), d_max)
            else:
                left, right = eye_polygons(face, margin)
                scores[i] = max(
                    contact_score(p, left, d_max), contact_score(p, right, d_max)
                )
        if continuous:
            return FilterSignal(name, CONTINUOUS, scores, valid)
        return FilterSignal(name, BOOLEAN, scores >= threshold, valid)

    # containment path: score >= threshold >= 1 can only hold inside the ROI
    if threshold > 1.0:
        return FilterSignal(name, BOOLEAN, np.zeros(n, dtype=bool), valid)
    if region == "face":
        inside = points_in_hulls(arr["landmarks"], arr["gaze"])
    else:
        left, right = _scaled_eye_sets(arr["landmarks"], margin)
        inside = points_in_hulls(left, arr["gaze"]) | points_in_hulls(right, arr["gaze"])
    return FilterSignal(name, BOOLEAN, inside, valid)


def eval_face_contact(
    session: SyncedSession,
    participant: str,
    threshold: float = 1.0,
    d_max: float = 100.0,
) -> FilterSignal:
    """True where the participant's gaze hits the partner's face hull."""
    return _contact_signal(
        _SessionData(session), participant, "face", threshold, 1.0, d_max,
        name=f"face({participant})",
    )


def eval_eye_contact(
    session: SyncedSession,
    participant: str,
    margin: float = 1.5,
    threshold: float = 1.0,
    d_max: float = 100.0,
) -> FilterSignal:
    """True where the gaze lands inside either of the partner's eye regions."""
    return _contact_signal(
        _SessionData(session), participant, "eye", threshold, margin, d_max,
        name=f"eye({participant})",
    )


def eval_face_score(
    session: SyncedSession, participant: str, d_max: float = 100.0
) -> FilterSignal:
    """Continuous face-contact score in [0, 1]."""
    return _contact_signal(
        _SessionData(session), participant, "face", 1.0, 1.0, d_max,
        name=f"face_score({participant})", continuous=True,
    )


def eval_eye_score(
    session: SyncedSession,
    participant: str,
    margin: float = 1.5,
    d_max: float = 100.0,
) -> FilterSignal:
    """Continuous eye-contact score in [0, 1] (max over the two eyes)."""
    return _contact_signal(
        _SessionData(session), participant, "eye", 1.0, margin, d_max,
        name=f"eye_score({participant})", continuous=True,
    )


def _au_signal(
    data: _SessionData,
    participant: str,
    au_id: int,
    mode: str,
    threshold: float,
    name: str,
) -> FilterSignal:
    arr = data.partner_faces_of(participant)
    faces = [f.face for f in arr["frames"]]
    known = next((f for f in faces if f is not None), None)
    table = "au_presence" if mode == "presence" else "au_intensity"
    if known is None or au_id not in getattr(known, table):
        have = sorted(getattr(known, table)) if known is not None else []
        raise UnknownAU(f"AU{au_id:02d} ({mode}) not in face data; available: {have}")
    valid = arr["face_ok"]
    values = np.zeros(len(valid), dtype=bool)
    for i in np.flatnonzero(valid):
        f = faces[i]
        if mode == "presence":
            values[i] = f.au_presence[au_id] == 1
        else:
            values[i] = f.au_intensity[au_id] >= threshold
    return FilterSignal(name, BOOLEAN, values, valid)


def eval_au(
    session: SyncedSession,
    participant: str,
    au_id: int,
    mode: str = "presence",
    threshold: float = 1.0,
) -> FilterSignal:
    """AU activity of `participant`'s own face (detected by the partner's camera)."""
    if mode not in ("presence", "intensity"):
        raise ValueError(f"mode must be 'presence' or 'intensity', got {mode!r}")
    code = "c" if mode == "presence" else "r"
    name = f"au({participant},AU{au_id:02d},{code})"
    return _au_signal(_SessionData(session), participant, au_id, mode, threshold, name)


def eval_emotion(
    session: SyncedSession,
    participant: str,
    name: str,
    table: EmotionTable | None = None,
) -> FilterSignal:
    """Presence conjunction of the AUs that define the named emotion."""
    table = table or EmotionTable.default()
    if name not in table:
        raise UnknownEmotion(f"emotion {name!r} not in table; have {sorted(table.entries)}")
    data = _SessionData(session)
    sig = None
    for au_id in sorted(table[name]):
        nxt = _au_signal(data, participant, au_id, "presence", 1.0, f"au({participant},AU{au_id:02d},c)")
        sig = nxt if sig is None else signal_and(sig, nxt)
    return sig.renamed(f"emotion({participant},{name})")


def eval_mutual(a: FilterSignal, b: FilterSignal, name: str | None = None) -> FilterSignal:
    """Both boolean operands true on jointly valid frames."""
    _require_boolean(a, "mutual")
    _require_boolean(b, "mutual")
    _require_same_length(a, b)
    valid = a.valid & b.valid
    return FilterSignal(
        name or f"mutual({a.name},{b.name})", BOOLEAN, a.values & b.values, valid
    )


def signal_and(a: FilterSignal, b: FilterSignal, name: str | None = None) -> FilterSignal:
    _require_same_length(a, b)
    valid = a.valid & b.valid
    label = name or f"({a.name} & {b.name})"
    if a.kind == BOOLEAN and b.kind == BOOLEAN:
        return FilterSignal(label, BOOLEAN, a.values & b.values, valid)
    if a.kind == CONTINUOUS and b.kind == CONTINUOUS:
        return FilterSignal(label, CONTINUOUS, np.minimum(a.values, b.values), valid)
    raise ExprTypeError("'&' operands must both be boolean or both continuous")


def signal_or(a: FilterSignal, b: FilterSignal, name: str | None = None) -> FilterSignal:
    _require_boolean(a, "'|'")
    _require_boolean(b, "'|'")
    _require_same_length(a, b)
    valid = a.valid & b.valid
    return FilterSignal(name or f"({a.name} | {b.name})", BOOLEAN, a.values | b.values, valid)


def signal_not(a: FilterSignal, name: str | None = None) -> FilterSignal:
    _require_boolean(a, "'!'")
    return FilterSignal(name or f"!{a.name}", BOOLEAN, ~a.values, a.valid)


def signal_threshold(a: FilterSignal, t: float, name: str | None = None) -> FilterSignal:
    if a.kind != CONTINUOUS:
        raise ExprTypeError(f"thresh requires a continuous signal, got {a.kind}")
    return FilterSignal(name or f"thresh({a.name},{t!r})", BOOLEAN, a.values >= t, a.valid)


def _bool_runs(mask: np.ndarray):
    """(start, end_inclusive) pairs of the true runs in a boolean array."""
    idx = np.flatnonzero(np.diff(np.concatenate(([False], mask, [False])).astype(np.int8)))
    return list(zip(idx[0::2], idx[1::2] - 1))


def smooth(
    signal: FilterSignal,
    merge_gap_frames: int = 2,
    min_duration_frames: int = 2,
    name: str | None = None,
) -> FilterSignal:
    """Close short false gaps between true runs, then drop short runs.

    Operates on the effective (valid AND true) sequence; validity is
    untouched, so invalid frames stay invalid and keep value 0. Gaps are
    only bridged between true runs, never at the signal edges.
    """
    _require_boolean(signal, "smooth")
    if merge_gap_frames < 0:
        raise ValueError("merge_gap_frames must be >= 0")
    if min_duration_frames < 1:
        raise ValueError("min_duration_frames must be >= 1")
    e = signal.values & signal.valid
    runs = _bool_runs(e)
    filled = e.copy()
    for (_, prev_end), (next_start, _) in zip(runs, runs[1:]):
        if next_start - prev_end - 1 <= merge_gap_frames:
            filled[prev_end + 1:next_start] = True
    out = filled.copy()
    for start, end in _bool_runs(filled):
        if end - start + 1 < min_duration_frames:
            out[start:end + 1] = False
    return FilterSignal(
        name or f"smooth({signal.name},{merge_gap_frames},{min_duration_frames})",
        BOOLEAN,
        out,
        signal.valid,
    )


# -- expression AST ------------------------------------------------------------

@dataclass(frozen=True)
class FaceNode:
    participant: str


@dataclass(frozen=True)
class EyeNode:
    participant: str


@dataclass(frozen=True)
class FaceScoreNode:
    participant: str


@dataclass(frozen=True)
class EyeScoreNode:
    participant: str


@dataclass(frozen=True)
class AuNode:
    participant: str
    au_id: int
    mode: str  # "presence" | "intensity"
    threshold: float | None = None


@dataclass(frozen=True)
class EmotionNode:
    participant: str
    emotion: str


@dataclass(frozen=True)
class AndNode:
    left: object
    right: object


@dataclass(frozen=True)
class OrNode:
    left: object
    right: object


@dataclass(frozen=True)
class NotNode:
    operand: object


@dataclass(frozen=True)
class MutualNode:
    left: object
    right: object


@dataclass(frozen=True)
class SmoothNode:
    operand: object
    merge_gap: int | None = None
    min_duration: int | None = None


@dataclass(frozen=True)
class ThreshNode:
    operand: object
    threshold: float


FilterExpr = object  # any of the node types above


def expr_kind(node) -> str:
    """Result kind of a type-checked node."""
    if isinstance(node, (FaceScoreNode, EyeScoreNode)):
        return CONTINUOUS
    if isinstance(node, AndNode):
        return expr_kind(node.left)
    return BOOLEAN


def _type_check(node) -> str:
    if isinstance(node, (FaceNode, EyeNode, FaceScoreNode, EyeScoreNode, AuNode, EmotionNode)):
        return expr_kind(node)
    if isinstance(node, AndNode):
        lk, rk = _type_check(node.left), _type_check(node.right)
        if lk != rk:
            raise ExprTypeError("'&' operands must both be boolean or both continuous")
        return lk
    if isinstance(node, OrNode):
        for side in (node.left, node.right):
            if _type_check(side) != BOOLEAN:
                raise ExprTypeError("'|' requires boolean operands")
        return BOOLEAN
    if isinstance(node, NotNode):
        if _type_check(node.operand) != BOOLEAN:
            raise ExprTypeError("'!' requires a boolean operand")
        return BOOLEAN
    if isinstance(node, MutualNode):
        for side in (node.left, node.right):
            if _type_check(side) != BOOLEAN:
                raise ExprTypeError("mutual requires boolean operands")
        return BOOLEAN
    if isinstance(node, SmoothNode):
        if _type_check(node.operand) != BOOLEAN:
            raise ExprTypeError("smooth requires a boolean operand")
        return BOOLEAN
    if isinstance(node, ThreshNode):
        if _type_check(node.operand) != CONTINUOUS:
            raise ExprTypeError("thresh requires a continuous operand")
        return BOOLEAN
    raise ExprTypeError(f"unknown expression node {node!r}")


def _fmt_num(x: float) -> str:
    return repr(int(x)) if float(x) == int(x) else repr(float(x))


def normalize(node) -> str:
    """Canonical text of an expression; the evaluation cache key."""
    if isinstance(node, FaceNode):
        return f"face({node.participant})"
    if isinstance(node, EyeNode):
        return f"eye({node.participant})"
    if isinstance(node, FaceScoreNode):
        return f"face_score({node.participant})"
    if isinstance(node, EyeScoreNode):
        return f"eye_score({node.participant})"
    if isinstance(node, AuNode):
        code = "c" if node.mode == "presence" else "r"
        tail = "" if node.threshold is None else f",{_fmt_num(node.threshold)}"
        return f"au({node.participant},AU{node.au_id:02d},{code}{tail})"
    if isinstance(node, EmotionNode):
        return f"emotion({node.participant},{node.emotion})"
    if isinstance(node, AndNode):
        return f"({normalize(node.left)} & {normalize(node.right)})"
    if isinstance(node, OrNode):
        return f"({normalize(node.left)} | {normalize(node.right)})"
    if isinstance(node, NotNode):
        return f"!{normalize(node.operand)}"
    if isinstance(node, MutualNode):
        return f"mutual({normalize(node.left)},{normalize(node.right)})"
    if isinstance(node, SmoothNode):
        args = [normalize(node.operand)]
        if node.merge_gap is not None:
            args.append(str(node.merge_gap))
        if node.min_duration is not None:
            args.append(str(node.min_duration))
        return f"smooth({','.join(args)})"
    if isinstance(node, ThreshNode):
        return f"thresh({normalize(node.operand)},{_fmt_num(node.threshold)})"
    raise ExprTypeError(f"unknown expression node {node!r}")


# -- expression parser ---------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+(?:\.\d+)?)|(?P<punct>[&|!(),]))"
)
_AU_NAME = re.compile(r"^(?:AU)?(\d+)$", re.IGNORECASE)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                at = len(text) - len(stripped)
                raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, value, pos = self.peek()
        if value != text:
            raise ExprSyntaxError(f"expected {text!r}, found {value or 'end of input'!r}", pos)
        return self.next()

    # precedence: ! binds tighter than &, which binds tighter than |
    def parse(self):
        node = self.or_expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing {value!r}", pos)
        _type_check(node)
        return node

    def or_expr(self):
        node = self.and_expr()
        while self.peek()[1] == "|":
            self.next()
            node = OrNode(node, self.and_expr())
        return node

    def and_expr(self):
        node = self.unary()
        while self.peek()[1] == "&":
            self.next()
            node = AndNode(node, self.unary())
        return node

    def unary(self):
        if self.peek()[1] == "!":
            self.next()
            return NotNode(self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.peek()
        if value == "(":
            self.next()
            node = self.or_expr()
            self.expect(")")
            return node
        if kind == "ident":
            return self.call()
        raise ExprSyntaxError(f"expected a filter or '(', found {value or 'end of input'!r}", pos)

    def call(self):
        _, fname, fpos = self.next()
        self.expect("(")
        args: list[tuple[str, str, int]] = []
        exprs: list[object] = []
        if fname in ("mutual", "smooth", "thresh"):
            exprs.append(self.or_expr())
            while self.peek()[1] == ",":
                self.next()
                if fname == "mutual":
                    exprs.append(self.or_expr())
                else:
                    args.append(self._scalar_arg())
        else:
            if self.peek()[1] != ")":
                args.append(self._scalar_arg())
                while self.peek()[1] == ",":
                    self.next()
                    args.append(self._scalar_arg())
        self.expect(")")
        return self._build_call(fname, fpos, exprs, args)

    def _scalar_arg(self):
        kind, value, pos = self.peek()
        if kind in ("ident", "num"):
            return self.next()
        raise ExprSyntaxError(f"expected an argument, found {value or 'end of input'!r}", pos)

    def _build_call(self, fname, fpos, exprs, args):
        def need(n: int):
            if len(args) != n:
                raise ExprTypeError(
                    f"{fname} takes {n} argument{'s' if n != 1 else ''}, got {len(args)}"
                )

        if fname in ("face", "eye", "face_score", "eye_score"):
            need(1)
            cls = {
                "face": FaceNode, "eye": EyeNode,
                "face_score": FaceScoreNode, "eye_score": EyeScoreNode,
            }[fname]
            return cls(args[0][1])
        if fname == "au":
            if len(args) not in (3, 4):
                raise ExprTypeError(f"au takes 3 or 4 arguments, got {len(args)}")
            m = _AU_NAME.match(args[1][1])
            if m is None:
                raise ExprSyntaxError(f"bad AU id {args[1][1]!r}", args[1][2])
            mode_tok = args[2][1].lower()
            if mode_tok not in ("c", "r"):
                raise ExprSyntaxError(f"AU mode must be 'c' or 'r', got {args[2][1]!r}", args[2][2])
            thr = float(args[3][1]) if len(args) == 4 else None
            return AuNode(
                participant=args[0][1],
                au_id=int(m.group(1)),
                mode="presence" if mode_tok == "c" else "intensity",
                threshold=thr,
            )
        if fname == "emotion":
            need(2)
            return EmotionNode(args[0][1], args[1][1])
        if fname == "mutual":
            if len(exprs) != 2:
                raise ExprTypeError(f"mutual takes exactly 2 arguments, got {len(exprs)}")
            return MutualNode(exprs[0], exprs[1])
        if fname == "smooth":
            if len(exprs) != 1 or len(args) > 2:
                raise ExprTypeError("smooth takes an expression and up to 2 integers")
            gap = int(args[0][1]) if len(args) >= 1 else None
            mindur = int(args[1][1]) if len(args) >= 2 else None
            return SmoothNode(exprs[0], gap, mindur)
        if fname == "thresh":
            if len(exprs) != 1 or len(args) != 1:
                raise ExprTypeError("thresh takes an expression and a number")
            return ThreshNode(exprs[0], float(args[0][1]))
        raise ExprSyntaxError(f"unknown filter {fname!r}", fpos)


def parse_filter_expr(text: str):
    """Parse and type-check a filter expression; returns the AST."""
    return _Parser(text).parse()


# -- evaluator -----------------------------------------------------------------

class Evaluator:
    """Evaluates expressions over one immutable session.

    Results are cached by normalized expression text (subexpressions
    included), so repeated and overlapping submissions are cheap. Safe
    for concurrent use: the session is never mutated and the cache is
    the only synchronized state.
    """

    def __init__(
        self,
        session: SyncedSession,
        config: FilterConfig | None = None,
        emotions: EmotionTable | None = None,
    ):
        self.session = session
        self.config = config or FilterConfig()
        self.emotions = emotions or EmotionTable.default()
        self._data = _SessionData(session)
        self._cache: dict[str, FilterSignal] = {}
        self._lock = threading.Lock()

    def evaluate(self, expr) -> FilterSignal:
        """Evaluate an expression AST or source text to a FilterSignal."""
        node = parse_filter_expr(expr) if isinstance(expr, str) else expr
        _type_check(node)
        return self._eval(node)

    def _eval(self, node) -> FilterSignal:
        key = normalize(node)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        sig = self._compute(node, key)
        with self._lock:
            self._cache[key] = sig
        return sig

    def _compute(self, node, key: str) -> FilterSignal:
        cfg = self.config
        if isinstance(node, FaceNode):
            return _contact_signal(
                self._data, node.participant, "face",
                cfg.face_threshold, 1.0, cfg.d_max, name=key,
            )
        if isinstance(node, EyeNode):
            return _contact_signal(
                self._data, node.participant, "eye",
                cfg.eye_threshold, cfg.eye_margin, cfg.d_max, name=key,
            )
        if isinstance(node, FaceScoreNode):
            return _contact_signal(
                self._data, node.participant, "face",
                1.0, 1.0, cfg.d_max, name=key, continuous=True,
            )
        if isinstance(node, EyeScoreNode):
            return _contact_signal(
                self._data, node.participant, "eye",
                1.0, cfg.eye_margin, cfg.d_max, name=key, continuous=True,
            )
        if isinstance(node, AuNode):
            thr = node.threshold if node.threshold is not None else cfg.au_intensity_threshold
            return _au_signal(self._data, node.participant, node.au_id, node.mode, thr, key)
        if isinstance(node, EmotionNode):
            if node.emotion not in self.emotions:
                raise UnknownEmotion(
                    f"emotion {node.emotion!r} not in table; have {sorted(self.emotions.entries)}"
                )
            sig = None
            for au_id in sorted(self.emotions[node.emotion]):
                part = self._eval(AuNode(node.participant, au_id, "presence"))
                sig = part if sig is None else signal_and(sig, part)
            return sig.renamed(key)
        if isinstance(node, AndNode):
            return signal_and(self._eval(node.left), self._eval(node.right), name=key)
        if isinstance(node, OrNode):
            return signal_or(self._eval(node.left), self._eval(node.right), name=key)
        if isinstance(node, NotNode):
            return signal_not(self._eval(node.operand), name=key)
        if isinstance(node, MutualNode):
            return eval_mutual(self._eval(node.left), self._eval(node.right), name=key)
        if isinstance(node, SmoothNode):
            gap = node.merge_gap if node.merge_gap is not None else cfg.smooth_gap
            mindur = node.min_duration if node.min_duration is not None else cfg.smooth_min
            return smooth(self._eval(node.operand), gap, mindur, name=key)
        if isinstance(node, ThreshNode):
            return signal_threshold(self._eval(node.operand), node.threshold, name=key)
        raise ExprTypeError(f"unknown expression node {node!r}")
