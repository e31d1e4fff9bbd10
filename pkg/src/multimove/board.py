"""Board state and move generation for Multimove Chess (i,j).

Multimove Chess (i,j) plays like standard chess except that White makes i
consecutive moves per turn, Black makes j, and the game is decided solely by
capturing the enemy king.  Consequences wired into this module:

  * There is no notion of check.  Moving the king onto an attacked square,
    leaving it attacked, and ignoring pins are all legal.
  * Capturing the enemy king ends the game at once; the rest of the turn is
    void.
  * Castling needs only unmoved king/rook and empty squares between them.
  * Promotion is mandatory (N/B/R/Q) and the new piece may move again within
    the same turn.
  * A double pawn push opens an en-passant window whose lifetime depends on
    the configured freshness rule (see TurnConfig.ep_rule):
      - "strict": the target expires after the very next move of the game by
        anyone, so only the opponent's first reply move can use it.
      - "loose": the target survives until the opponent's next turn ends.
  * If the side to move has no legal move mid-turn, the remainder of the turn
    is forfeited and play passes to the opponent.  No stalemate result exists.

Square indexing is little-endian rank-file (a1=0, h1=7, a8=56, h8=63).
Internally moves are packed ints; the dataclasses at the top are the public
value types.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

WHITE = 0
BLACK = 1

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6

KIND_NAMES = {PAWN: "pawn", KNIGHT: "knight", BISHOP: "bishop",
              ROOK: "rook", QUEEN: "queen", KING: "king"}
KIND_LETTERS = {PAWN: "p", KNIGHT: "n", BISHOP: "b", ROOK: "r", QUEEN: "q", KING: "k"}
LETTER_KINDS = {v: k for k, v in KIND_LETTERS.items()}

# Piece codes: 0 empty, 1..6 white P..K, 7..12 black P..K.
def piece_code(color: int, kind: int) -> int:
    return kind + 6 * color

def code_color(code: int) -> int:
    return WHITE if code <= 6 else BLACK

def code_kind(code: int) -> int:
    return code - 6 if code > 6 else code

WP, WN, WB, WR, WQ, WK = 1, 2, 3, 4, 5, 6
BP, BN, BB_, BR, BQ, BK = 7, 8, 9, 10, 11, 12

CODE_CHARS = ".PNBRQKpnbrqk"

# Move kinds.
MK_QUIET = 0
MK_CAPTURE = 1
MK_DOUBLE = 2
MK_EP = 3
MK_CASTLE_K = 4
MK_CASTLE_Q = 5

# Castling rights bits.
CR_WK, CR_WQ, CR_BK, CR_BQ = 1, 2, 4, 8

MAX_MOVES_PER_TURN = 64

FILE_A = 0x0101010101010101
FILE_H = 0x8080808080808080
RANK_1 = 0x00000000000000FF
RANK_2 = 0x000000000000FF00
RANK_3 = 0x0000000000FF0000
RANK_6 = 0x0000FF0000000000
RANK_7 = 0x00FF000000000000
RANK_8 = 0xFF00000000000000
FULL = 0xFFFFFFFFFFFFFFFF

SQUARE_NAMES = [chr(ord("a") + (s & 7)) + str((s >> 3) + 1) for s in range(64)]
NAME_SQUARES = {n: s for s, n in enumerate(SQUARE_NAMES)}

# Algebraic-string order ("a1" < "a2" < ... < "b1"): file-major.  Used for the
# documented deterministic move ordering.
SQ_ORD = [((s & 7) << 3) | (s >> 3) for s in range(64)]

# Promotion letters sort b < n < q < r, i.e. full long-algebraic token order.
PROMO_ORD = {0: 0, BISHOP: 1, KNIGHT: 2, QUEEN: 3, ROOK: 4}
PROMO_KINDS = (KNIGHT, BISHOP, ROOK, QUEEN)


class IllegalMoveError(ValueError):
    """A move rejected by apply_move, with a machine-readable reason code."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"illegal move ({reason})" + (f": {detail}" if detail else ""))


class RulesError(ValueError):
    """State violates a board invariant (e.g. both kings absent)."""


# ---------------------------------------------------------------------------
# Move packing: from | to<<6 | promo<<12 | kind<<15


def pack_move(frm: int, to: int, promo: int = 0, mk: int = MK_QUIET) -> int:
    return frm | (to << 6) | (promo << 12) | (mk << 15)

def move_from(m: int) -> int:
    return m & 63

def move_to(m: int) -> int:
    return (m >> 6) & 63

def move_promo(m: int) -> int:
    return (m >> 12) & 7

def move_mk(m: int) -> int:
    return (m >> 15) & 7

def move_text(m: int) -> str:
    t = SQUARE_NAMES[m & 63] + SQUARE_NAMES[(m >> 6) & 63]
    p = (m >> 12) & 7
    return t + KIND_LETTERS[p] if p else t


def move_sort_key(m: int, enemy_king_sq: int) -> int:
    """Canonical order: king captures, then other captures, then quiet moves,
    each sub-ordered by the long-algebraic token (from, to, promotion)."""
    mk = (m >> 15) & 7
    to = (m >> 6) & 63
    if to == enemy_king_sq and mk == MK_CAPTURE:
        cls = 0
    elif mk == MK_CAPTURE or mk == MK_EP:
        cls = 1
    else:
        cls = 2
    return (cls << 18) | (SQ_ORD[m & 63] << 12) | (SQ_ORD[to] << 6) | PROMO_ORD[(m >> 12) & 7]


# ---------------------------------------------------------------------------
# Public value types


@dataclass(frozen=True, order=True)
class Square:
    """A board coordinate; file and rank are both 0-7 (a-h, 1-8)."""

    file: int
    rank: int

    def __post_init__(self):
        if not (0 <= self.file <= 7 and 0 <= self.rank <= 7):
            raise ValueError(f"square off board: file={self.file} rank={self.rank}")

    @property
    def index(self) -> int:
        return self.rank * 8 + self.file

    @staticmethod
    def from_index(sq: int) -> "Square":
        return Square(sq & 7, sq >> 3)

    @staticmethod
    def from_name(name: str) -> "Square":
        if len(name) != 2 or name not in NAME_SQUARES:
            raise ValueError(f"bad square name {name!r}")
        s = NAME_SQUARES[name]
        return Square(s & 7, s >> 3)

    def __str__(self) -> str:
        return SQUARE_NAMES[self.index]


@dataclass(frozen=True)
class Piece:
    color: int
    kind: int

    def __post_init__(self):
        if self.color not in (WHITE, BLACK) or self.kind not in KIND_NAMES:
            raise ValueError(f"bad piece ({self.color},{self.kind})")

    @property
    def symbol(self) -> str:
        ch = KIND_LETTERS[self.kind]
        return ch.upper() if self.color == WHITE else ch


@dataclass(frozen=True)
class TurnConfig:
    """The (i,j) pair: moves per White turn and per Black turn.

    ep_rule selects the en-passant freshness rule under multimove turns
    ("strict" is the default; "loose" keeps the window open for the whole of
    the opponent's next turn).
    """

    white_moves_per_turn: int
    black_moves_per_turn: int
    ep_rule: str = "strict"

    def __post_init__(self):
        if not (1 <= self.white_moves_per_turn <= MAX_MOVES_PER_TURN):
            raise ValueError(f"white moves/turn out of range: {self.white_moves_per_turn}")
        if not (1 <= self.black_moves_per_turn <= MAX_MOVES_PER_TURN):
            raise ValueError(f"black moves/turn out of range: {self.black_moves_per_turn}")
        if self.ep_rule not in ("strict", "loose"):
            raise ValueError(f"unknown ep rule {self.ep_rule!r}")

    def allowance(self, color: int) -> int:
        return self.white_moves_per_turn if color == WHITE else self.black_moves_per_turn

    def mirrored(self) -> "TurnConfig":
        return TurnConfig(self.black_moves_per_turn, self.white_moves_per_turn, self.ep_rule)


@dataclass(frozen=True)
class Move:
    """One ply.  promotion is a piece kind (KNIGHT..QUEEN) or None."""

    from_square: Square
    to_square: Square
    promotion: Optional[int] = None
    kind: int = MK_QUIET

    def __post_init__(self):
        if self.from_square == self.to_square:
            raise ValueError("null move")
        if self.promotion is not None and self.promotion not in PROMO_KINDS:
            raise ValueError(f"bad promotion kind {self.promotion}")

    @property
    def text(self) -> str:
        t = str(self.from_square) + str(self.to_square)
        return t + KIND_LETTERS[self.promotion] if self.promotion else t

    def packed(self) -> int:
        return pack_move(self.from_square.index, self.to_square.index,
                         self.promotion or 0, self.kind)

    @staticmethod
    def from_packed(m: int) -> "Move":
        return Move(Square.from_index(m & 63), Square.from_index((m >> 6) & 63),
                    ((m >> 12) & 7) or None, (m >> 15) & 7)

    def __str__(self) -> str:
        return self.text


# ---------------------------------------------------------------------------
# Precomputed attack tables

def _bits(bb: int) -> Iterator[int]:
    while bb:
        lsb = bb & -bb
        yield lsb.bit_length() - 1
        bb ^= lsb


def _build_step_table(offsets) -> List[int]:
    table = [0] * 64
    for sq in range(64):
        r, f = divmod(sq, 8)
        bb = 0
        for dr, df in offsets:
            nr, nf = r + dr, f + df
            if 0 <= nr < 8 and 0 <= nf < 8:
                bb |= 1 << (nr * 8 + nf)
        table[sq] = bb
    return table


KNIGHT_ATK = _build_step_table([(2, 1), (2, -1), (-2, 1), (-2, -1),
                                (1, 2), (1, -2), (-1, 2), (-1, -2)])
KING_ATK = _build_step_table([(1, 0), (-1, 0), (0, 1), (0, -1),
                              (1, 1), (1, -1), (-1, 1), (-1, -1)])
# PAWN_ATK[color][sq]: squares attacked by a pawn of that color standing on sq.
PAWN_ATK = [_build_step_table([(1, -1), (1, 1)]),
            _build_step_table([(-1, -1), (-1, 1)])]


def _ray(sq: int, dr: int, df: int, stop_before_edge: bool) -> int:
    bb = 0
    r, f = divmod(sq, 8)
    r, f = r + dr, f + df
    while 0 <= r < 8 and 0 <= f < 8:
        nxt_r, nxt_f = r + dr, f + df
        if stop_before_edge and not (0 <= nxt_r < 8 and 0 <= nxt_f < 8):
            break
        bb |= 1 << (r * 8 + f)
        r, f = nxt_r, nxt_f
    return bb


def _slide_attacks(sq: int, occupied: int, dirs) -> int:
    bb = 0
    r0, f0 = divmod(sq, 8)
    for dr, df in dirs:
        r, f = r0 + dr, f0 + df
        while 0 <= r < 8 and 0 <= f < 8:
            t = r * 8 + f
            bb |= 1 << t
            if occupied & (1 << t):
                break
            r, f = r + dr, f + df
    return bb


def _build_slider_tables(dirs) -> Tuple[List[int], List[Dict[int, int]]]:
    masks = [0] * 64
    attacks: List[Dict[int, int]] = [dict() for _ in range(64)]
    for sq in range(64):
        mask = 0
        for dr, df in dirs:
            mask |= _ray(sq, dr, df, stop_before_edge=True)
        masks[sq] = mask
        # Carry-rippler subset enumeration of the relevant-occupancy mask.
        subset = 0
        while True:
            attacks[sq][subset] = _slide_attacks(sq, subset, dirs)
            subset = (subset - mask) & mask
            if subset == 0:
                break
    return masks, attacks


_ROOK_DIRS = [(1, 0), (-1, 0), (0, 1), (0, -1)]
_BISHOP_DIRS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
ROOK_MASK, ROOK_TBL = _build_slider_tables(_ROOK_DIRS)
BISHOP_MASK, BISHOP_TBL = _build_slider_tables(_BISHOP_DIRS)


def rook_attacks(sq: int, occ: int) -> int:
    return ROOK_TBL[sq][occ & ROOK_MASK[sq]]

def bishop_attacks(sq: int, occ: int) -> int:
    return BISHOP_TBL[sq][occ & BISHOP_MASK[sq]]

def queen_attacks(sq: int, occ: int) -> int:
    return ROOK_TBL[sq][occ & ROOK_MASK[sq]] | BISHOP_TBL[sq][occ & BISHOP_MASK[sq]]


# ---------------------------------------------------------------------------
# Zobrist keys (fixed seed: hashes and certificates must reproduce across runs)

_zrng = random.Random(0x6D6D6368)  # "mmch"
Z_PIECE = [[_zrng.getrandbits(64) for _ in range(64)] for _ in range(13)]
Z_SIDE = _zrng.getrandbits(64)
Z_CASTLE = [_zrng.getrandbits(64) for _ in range(16)]
Z_EP = [_zrng.getrandbits(64) for _ in range(64)]
Z_MR = [_zrng.getrandbits(64) for _ in range(MAX_MOVES_PER_TURN + 1)]

A1, C1, D1, E1, F1, G1, H1 = 0, 2, 3, 4, 5, 6, 7
A8, C8, D8, E8, F8, G8, H8 = 56, 58, 59, 60, 61, 62, 63

_CASTLE_EMPTY = {
    (WHITE, MK_CASTLE_K): (1 << F1) | (1 << G1),
    (WHITE, MK_CASTLE_Q): (1 << 1) | (1 << C1) | (1 << D1),
    (BLACK, MK_CASTLE_K): (1 << F8) | (1 << G8),
    (BLACK, MK_CASTLE_Q): (1 << 57) | (1 << C8) | (1 << D8),
}

# Castling-rights mask to AND with when a square's occupant moves or is taken.
_CR_TOUCH = [0xF] * 64
_CR_TOUCH[A1] = 0xF ^ CR_WQ
_CR_TOUCH[H1] = 0xF ^ CR_WK
_CR_TOUCH[E1] = 0xF ^ (CR_WK | CR_WQ)
_CR_TOUCH[A8] = 0xF ^ CR_BQ
_CR_TOUCH[H8] = 0xF ^ CR_BK
_CR_TOUCH[E8] = 0xF ^ (CR_BK | CR_BQ)


class Position:
    """Full game state.  Value semantics: copy() is cheap, all public
    operations are pure; make/unmake are the internal in-place fast path."""

    __slots__ = ("bb", "occ", "occ_all", "piece_at", "side_to_move",
                 "moves_remaining", "castling", "ep_target", "winner",
                 "config", "zkey")

    def __init__(self, config: TurnConfig):
        self.bb = [0] * 13
        self.occ = [0, 0]
        self.occ_all = 0
        self.piece_at = bytearray(64)
        self.side_to_move = WHITE
        self.moves_remaining = config.white_moves_per_turn
        self.castling = 0
        self.ep_target = -1  # square index or -1
        self.winner: Optional[int] = None
        self.config = config
        self.zkey = 0

    # -- construction ------------------------------------------------------

    @staticmethod
    def initial(config: TurnConfig) -> "Position":
        pos = Position(config)
        back = [ROOK, KNIGHT, BISHOP, QUEEN, KING, BISHOP, KNIGHT, ROOK]
        for f in range(8):
            pos._put(f, piece_code(WHITE, back[f]))
            pos._put(8 + f, WP)
            pos._put(48 + f, BP)
            pos._put(56 + f, piece_code(BLACK, back[f]))
        pos.castling = CR_WK | CR_WQ | CR_BK | CR_BQ
        pos._rehash()
        return pos

    @staticmethod
    def from_pieces(pieces: Dict[Square, Piece], side_to_move: int,
                    moves_remaining: int, config: TurnConfig,
                    castling: int = 0, ep_target: Optional[Square] = None) -> "Position":
        """Build and validate a position from an explicit piece map."""
        pos = Position(config)
        for sq, piece in pieces.items():
            code = piece_code(piece.color, piece.kind)
            if pos.piece_at[sq.index]:
                raise RulesError(f"two pieces on {sq}")
            pos._put(sq.index, code)
        pos.side_to_move = side_to_move
        pos.castling = castling
        pos.ep_target = ep_target.index if ep_target is not None else -1
        pos.moves_remaining = moves_remaining
        pos._validate()
        pos._rehash()
        return pos

    def _put(self, sq: int, code: int) -> None:
        bit = 1 << sq
        self.bb[code] |= bit
        self.occ[code_color(code)] |= bit
        self.occ_all |= bit
        self.piece_at[sq] = code

    def _validate(self) -> None:
        if self.bb[WK].bit_count() > 1 or self.bb[BK].bit_count() > 1:
            raise RulesError("more than one king of a color")
        if (self.bb[WP] | self.bb[BP]) & (RANK_1 | RANK_8):
            raise RulesError("pawn on rank 1 or 8")
        wk, bk = self.bb[WK] != 0, self.bb[BK] != 0
        if not wk and not bk:
            raise RulesError("both kings absent")
        if not wk or not bk:
            self.winner = BLACK if not wk else WHITE
            if self.moves_remaining != 0:
                raise RulesError("terminal position with moves remaining")
        else:
            allowance = self.config.allowance(self.side_to_move)
            if not (1 <= self.moves_remaining <= allowance):
                raise RulesError(
                    f"moves_remaining {self.moves_remaining} outside 1..{allowance}")
        if self.ep_target != -1:
            r = self.ep_target >> 3
            if r not in (2, 5):
                raise RulesError("en-passant target not on rank 3 or 6")
            behind = self.ep_target + 8 if r == 2 else self.ep_target - 8
            pusher = WHITE if r == 2 else BLACK
            if self.piece_at[behind] != piece_code(pusher, PAWN):
                raise RulesError("en-passant target without its pawn")
        for bit, ksq, rsq, kcode, rcode in (
                (CR_WK, E1, H1, WK, WR), (CR_WQ, E1, A1, WK, WR),
                (CR_BK, E8, H8, BK, BR), (CR_BQ, E8, A8, BK, BR)):
            if self.castling & bit:
                if self.piece_at[ksq] != kcode or self.piece_at[rsq] != rcode:
                    raise RulesError("castling right without king/rook at home")

    def _rehash(self) -> None:
        z = 0
        for sq in range(64):
            code = self.piece_at[sq]
            if code:
                z ^= Z_PIECE[code][sq]
        if self.side_to_move == BLACK:
            z ^= Z_SIDE
        z ^= Z_CASTLE[self.castling]
        if self.ep_target != -1:
            z ^= Z_EP[self.ep_target]
        z ^= Z_MR[self.moves_remaining]
        self.zkey = z

    # -- value semantics ----------------------------------------------------

    def copy(self) -> "Position":
        pos = Position.__new__(Position)
        pos.bb = self.bb[:]
        pos.occ = self.occ[:]
        pos.occ_all = self.occ_all
        pos.piece_at = bytearray(self.piece_at)
        pos.side_to_move = self.side_to_move
        pos.moves_remaining = self.moves_remaining
        pos.castling = self.castling
        pos.ep_target = self.ep_target
        pos.winner = self.winner
        pos.config = self.config
        pos.zkey = self.zkey
        return pos

    def __eq__(self, other) -> bool:
        if not isinstance(other, Position):
            return NotImplemented
        return (self.piece_at == other.piece_at
                and self.side_to_move == other.side_to_move
                and self.moves_remaining == other.moves_remaining
                and self.castling == other.castling
                and self.ep_target == other.ep_target
                and self.winner == other.winner
                and self.config == other.config)

    def __hash__(self) -> int:
        return self.zkey

    # -- queries -------------------------------------------------------------

    @property
    def is_terminal(self) -> bool:
        return self.winner is not None

    def piece_map(self) -> Dict[Square, Piece]:
        out = {}
        for sq in range(64):
            code = self.piece_at[sq]
            if code:
                out[Square.from_index(sq)] = Piece(code_color(code), code_kind(code))
        return out

    def king_square(self, color: int) -> int:
        """Index of color's king, or -1 if captured."""
        bb = self.bb[WK if color == WHITE else BK]
        return bb.bit_length() - 1 if bb else -1

    def attacks_to(self, sq: int, by: int) -> int:
        """Bitboard of pieces of `by` that could capture on sq in one move."""
        base = 7 if by == BLACK else 1
        occ = self.occ_all
        atk = PAWN_ATK[by ^ 1][sq] & self.bb[base]          # pawn attacks sq
        atk |= KNIGHT_ATK[sq] & self.bb[base + 1]
        atk |= KING_ATK[sq] & self.bb[base + 5]
        bq = bishop_attacks(sq, occ)
        atk |= bq & (self.bb[base + 2] | self.bb[base + 4])
        rq = rook_attacks(sq, occ)
        atk |= rq & (self.bb[base + 3] | self.bb[base + 4])
        return atk

    def attacked_bb(self, by: int) -> int:
        """Bitboard of squares a piece of `by` could capture on in one move
        (pawns diagonally; squares holding `by`'s own pieces excluded)."""
        base = 7 if by == BLACK else 1
        occ = self.occ_all
        pawns = self.bb[base]
        if by == WHITE:
            atk = ((pawns & ~FILE_A) << 7) | ((pawns & ~FILE_H) << 9)
        else:
            atk = ((pawns & ~FILE_H) >> 7) | ((pawns & ~FILE_A) >> 9)
        for sq in _bits(self.bb[base + 1]):
            atk |= KNIGHT_ATK[sq]
        for sq in _bits(self.bb[base + 2]):
            atk |= bishop_attacks(sq, occ)
        for sq in _bits(self.bb[base + 3]):
            atk |= rook_attacks(sq, occ)
        for sq in _bits(self.bb[base + 4]):
            atk |= queen_attacks(sq, occ)
        kbb = self.bb[base + 5]
        if kbb:
            atk |= KING_ATK[kbb.bit_length() - 1]
        return atk & ~self.occ[by] & FULL

    def board_text(self) -> str:
        rows = []
        for r in range(7, -1, -1):
            row = " ".join(CODE_CHARS[self.piece_at[r * 8 + f]] for f in range(8))
            rows.append(f"{r + 1}  {row}")
        rows.append("   a b c d e f g h")
        return "\n".join(rows)

    def __repr__(self) -> str:
        side = "W" if self.side_to_move == WHITE else "B"
        win = "" if self.winner is None else f" winner={'WB'[self.winner ^ 1]}"
        return f"<Position {side} mr={self.moves_remaining}{win}>"

    # -- en-passant helpers ---------------------------------------------------

    def _ep_pawn_square(self) -> int:
        return self.ep_target + 8 if (self.ep_target >> 3) == 2 else self.ep_target - 8

    def _ep_usable(self) -> bool:
        if self.ep_target == -1:
            return False
        r = self.ep_target >> 3
        pusher = WHITE if r == 2 else BLACK
        if self.side_to_move == pusher:
            return False
        # Under the loose rule the pushed pawn may have been captured by a
        # previous move of this turn; the window dies with the pawn.
        return self.piece_at[self._ep_pawn_square()] == piece_code(pusher, PAWN)

    # -- move generation -------------------------------------------------------

    def gen_moves(self) -> List[int]:
        """All legal moves for the side to move, unsorted packed ints.
        Empty when terminal."""
        if self.winner is not None:
            return []
        side = self.side_to_move
        own = self.occ[side]
        enemy = self.occ[side ^ 1]
        occ = self.occ_all
        free = ~occ & FULL
        out: List[int] = []
        add = out.append
        base = 7 if side == BLACK else 1

        pawns = self.bb[base]
        if pawns:
            if side == WHITE:
                one = (pawns << 8) & free
                two = ((one & RANK_3) << 8) & free
                cap_w = ((pawns & ~FILE_A) << 7) & enemy
                cap_e = ((pawns & ~FILE_H) << 9) & enemy
                promo_rank = RANK_8
                d_one, d_w, d_e = 8, 7, 9
            else:
                one = (pawns >> 8) & free
                two = ((one & RANK_6) >> 8) & free
                cap_w = ((pawns & ~FILE_H) >> 7) & enemy
                cap_e = ((pawns & ~FILE_A) >> 9) & enemy
                promo_rank = RANK_1
                d_one, d_w, d_e = -8, -7, -9
            for t in _bits(one & ~promo_rank):
                add(pack_move(t - d_one, t))
            for t in _bits(one & promo_rank):
                for pk in PROMO_KINDS:
                    add(pack_move(t - d_one, t, pk))
            for t in _bits(two):
                add(pack_move(t - 2 * d_one, t, 0, MK_DOUBLE))
            for caps, d in ((cap_w, d_w), (cap_e, d_e)):
                for t in _bits(caps & ~promo_rank):
                    add(pack_move(t - d, t, 0, MK_CAPTURE))
                for t in _bits(caps & promo_rank):
                    for pk in PROMO_KINDS:
                        add(pack_move(t - d, t, pk, MK_CAPTURE))
            if self._ep_usable():
                for f in _bits(PAWN_ATK[side ^ 1][self.ep_target] & pawns):
                    add(pack_move(f, self.ep_target, 0, MK_EP))

        for f in _bits(self.bb[base + 1]):
            for t in _bits(KNIGHT_ATK[f] & ~own):
                add(pack_move(f, t, 0, MK_CAPTURE if enemy & (1 << t) else MK_QUIET))
        for f in _bits(self.bb[base + 2]):
            for t in _bits(bishop_attacks(f, occ) & ~own):
                add(pack_move(f, t, 0, MK_CAPTURE if enemy & (1 << t) else MK_QUIET))
        for f in _bits(self.bb[base + 3]):
            for t in _bits(rook_attacks(f, occ) & ~own):
                add(pack_move(f, t, 0, MK_CAPTURE if enemy & (1 << t) else MK_QUIET))
        for f in _bits(self.bb[base + 4]):
            for t in _bits(queen_attacks(f, occ) & ~own):
                add(pack_move(f, t, 0, MK_CAPTURE if enemy & (1 << t) else MK_QUIET))

        kbb = self.bb[base + 5]
        if kbb:
            f = kbb.bit_length() - 1
            for t in _bits(KING_ATK[f] & ~own):
                add(pack_move(f, t, 0, MK_CAPTURE if enemy & (1 << t) else MK_QUIET))
            if side == WHITE:
                if self.castling & CR_WK and not occ & _CASTLE_EMPTY[(WHITE, MK_CASTLE_K)]:
                    add(pack_move(E1, G1, 0, MK_CASTLE_K))
                if self.castling & CR_WQ and not occ & _CASTLE_EMPTY[(WHITE, MK_CASTLE_Q)]:
                    add(pack_move(E1, C1, 0, MK_CASTLE_Q))
            else:
                if self.castling & CR_BK and not occ & _CASTLE_EMPTY[(BLACK, MK_CASTLE_K)]:
                    add(pack_move(E8, G8, 0, MK_CASTLE_K))
                if self.castling & CR_BQ and not occ & _CASTLE_EMPTY[(BLACK, MK_CASTLE_Q)]:
                    add(pack_move(E8, C8, 0, MK_CASTLE_Q))
        return out

    def gen_moves_sorted(self) -> List[int]:
        ek = self.king_square(self.side_to_move ^ 1)
        return sorted(self.gen_moves(), key=lambda m: move_sort_key(m, ek))

    def king_capture_moves(self) -> List[int]:
        """Moves that capture the enemy king right now, canonical order."""
        if self.winner is not None:
            return []
        ek = self.king_square(self.side_to_move ^ 1)
        if ek < 0:
            return []
        out = []
        for f in sorted(_bits(self.attacks_to(ek, self.side_to_move)),
                        key=lambda s: SQ_ORD[s]):
            code = self.piece_at[f]
            if code_kind(code) == PAWN and (ek >> 3) in (0, 7):
                for pk in sorted(PROMO_KINDS, key=lambda k: PROMO_ORD[k]):
                    out.append(pack_move(f, ek, pk, MK_CAPTURE))
            else:
                out.append(pack_move(f, ek, 0, MK_CAPTURE))
        return out

    def has_any_move(self) -> bool:
        if self.winner is not None:
            return False
        side = self.side_to_move
        own = self.occ[side]
        occ = self.occ_all
        free = ~occ & FULL
        base = 7 if side == BLACK else 1
        pawns = self.bb[base]
        if pawns:
            enemy = self.occ[side ^ 1]
            if side == WHITE:
                if (pawns << 8) & free or ((pawns & ~FILE_A) << 7) & enemy \
                        or ((pawns & ~FILE_H) << 9) & enemy:
                    return True
            else:
                if (pawns >> 8) & free or ((pawns & ~FILE_H) >> 7) & enemy \
                        or ((pawns & ~FILE_A) >> 9) & enemy:
                    return True
        for f in _bits(self.bb[base + 1]):
            if KNIGHT_ATK[f] & ~own:
                return True
        kbb = self.bb[base + 5]
        if kbb and KING_ATK[kbb.bit_length() - 1] & ~own:
            return True
        for code in (base + 2, base + 3, base + 4):
            for f in _bits(self.bb[code]):
                att = (bishop_attacks(f, occ) if code == base + 2
                       else rook_attacks(f, occ) if code == base + 3
                       else queen_attacks(f, occ))
                if att & ~own:
                    return True
        if self._ep_usable() and PAWN_ATK[side ^ 1][self.ep_target] & pawns:
            return True
        return False

    # -- make / unmake (internal fast path) -------------------------------------

    def _move_piece_bits(self, m: int) -> int:
        """Apply the board part of a move; returns captured piece code
        (the pawn itself for en passant).  Updates zkey for board terms."""
        frm = m & 63
        to = (m >> 6) & 63
        promo = (m >> 12) & 7
        mk = (m >> 15) & 7
        zp = Z_PIECE
        code = self.piece_at[frm]
        side = code_color(code)
        fb = 1 << frm
        tb = 1 << to
        z = self.zkey ^ zp[code][frm]

        captured = 0
        if mk == MK_EP:
            csq = self._ep_pawn_square()
            captured = self.piece_at[csq]
            cb = 1 << csq
            self.bb[captured] ^= cb
            self.occ[side ^ 1] ^= cb
            self.occ_all ^= cb
            self.piece_at[csq] = 0
            z ^= zp[captured][csq]
        else:
            captured = self.piece_at[to]
            if captured:
                self.bb[captured] ^= tb
                self.occ[side ^ 1] ^= tb
                self.occ_all ^= tb
                z ^= zp[captured][to]

        new_code = piece_code(side, promo) if promo else code
        self.bb[code] ^= fb
        self.bb[new_code] |= tb
        self.occ[side] ^= fb | tb
        self.occ_all = (self.occ_all ^ fb) | tb
        self.piece_at[frm] = 0
        self.piece_at[to] = new_code
        z ^= zp[new_code][to]

        if mk == MK_CASTLE_K or mk == MK_CASTLE_Q:
            if side == WHITE:
                rf, rt = (H1, F1) if mk == MK_CASTLE_K else (A1, D1)
                rcode = WR
            else:
                rf, rt = (H8, F8) if mk == MK_CASTLE_K else (A8, D8)
                rcode = BR
            rb = (1 << rf) | (1 << rt)
            self.bb[rcode] ^= rb
            self.occ[side] ^= rb
            self.occ_all ^= rb
            self.piece_at[rf] = 0
            self.piece_at[rt] = rcode
            z ^= zp[rcode][rf] ^ zp[rcode][rt]

        self.zkey = z
        return captured

    def _unmove_piece_bits(self, m: int, captured: int) -> None:
        frm = m & 63
        to = (m >> 6) & 63
        promo = (m >> 12) & 7
        mk = (m >> 15) & 7
        code = self.piece_at[to]
        side = code_color(code)
        orig = piece_code(side, PAWN) if promo else code
        fb = 1 << frm
        tb = 1 << to

        self.bb[code] ^= tb
        self.bb[orig] |= fb
        self.occ[side] ^= fb | tb
        self.piece_at[to] = 0
        self.piece_at[frm] = orig

        if mk == MK_EP:
            csq = to + 8 if side == BLACK else to - 8
            cb = 1 << csq
            self.bb[captured] |= cb
            self.occ[side ^ 1] |= cb
            self.piece_at[csq] = captured
        elif captured:
            self.bb[captured] |= tb
            self.occ[side ^ 1] |= tb
            self.piece_at[to] = captured

        if mk == MK_CASTLE_K or mk == MK_CASTLE_Q:
            if side == WHITE:
                rf, rt = (H1, F1) if mk == MK_CASTLE_K else (A1, D1)
                rcode = WR
            else:
                rf, rt = (H8, F8) if mk == MK_CASTLE_K else (A8, D8)
                rcode = BR
            rb = (1 << rf) | (1 << rt)
            self.bb[rcode] ^= rb
            self.occ[side] ^= rb
            self.piece_at[rt] = 0
            self.piece_at[rf] = rcode

        self.occ_all = self.occ[0] | self.occ[1]

    def make(self, m: int):
        """Full-rules apply (assumes m legal).  Returns an opaque undo token."""
        token = (m, 0, self.castling, self.ep_target, self.moves_remaining,
                 self.side_to_move, self.winner, self.zkey)
        side = self.side_to_move
        mk = (m >> 15) & 7
        frm = m & 63
        to = (m >> 6) & 63

        captured = self._move_piece_bits(m)
        token = (m, captured, token[2], token[3], token[4], token[5], token[6], token[7])

        z = self.zkey
        new_castle = self.castling & _CR_TOUCH[frm] & _CR_TOUCH[to]
        if new_castle != self.castling:
            z ^= Z_CASTLE[self.castling] ^ Z_CASTLE[new_castle]
            self.castling = new_castle

        # En-passant window bookkeeping (see module docstring).
        old_ep = self.ep_target
        if mk == MK_DOUBLE:
            new_ep = (frm + to) >> 1
        elif self.config.ep_rule == "strict" or mk == MK_EP:
            new_ep = -1
        else:
            new_ep = old_ep  # loose: may still expire below on turn flip

        won = captured in (WK, BK)
        if won:
            self.winner = side
            z ^= Z_MR[self.moves_remaining] ^ Z_MR[0]
            self.moves_remaining = 0
        else:
            mr = self.moves_remaining - 1
            z ^= Z_MR[self.moves_remaining]
            stm = side
            if mr == 0:
                stm = side ^ 1
                mr = self.config.allowance(stm)
                z ^= Z_SIDE
            self.side_to_move = stm
            self.moves_remaining = mr
            z ^= Z_MR[mr]

        # Loose-rule expiry: the window closes when the pusher is back on move.
        if new_ep != -1 and self.config.ep_rule == "loose" and mk != MK_DOUBLE:
            pusher = WHITE if (new_ep >> 3) == 2 else BLACK
            if won or (self.side_to_move == pusher and side != pusher):
                new_ep = -1
        if new_ep != old_ep:
            if old_ep != -1:
                z ^= Z_EP[old_ep]
            if new_ep != -1:
                z ^= Z_EP[new_ep]
            self.ep_target = new_ep
        self.zkey = z

        # Forfeit rule: a stuck side loses the rest of its turn.  If both
        # sides are stuck the position freezes (no legal moves, not terminal).
        if not won and not self.has_any_move():
            other = self.side_to_move ^ 1
            save = (self.side_to_move, self.moves_remaining)
            self.side_to_move = other
            self.moves_remaining = self.config.allowance(other)
            if self.has_any_move():
                self.zkey ^= Z_SIDE ^ Z_MR[save[1]] ^ Z_MR[self.moves_remaining]
                if self.ep_target != -1 and self.config.ep_rule == "loose":
                    # Skipped turn counts as the opponent's turn for expiry.
                    pusher = WHITE if (self.ep_target >> 3) == 2 else BLACK
                    if other == pusher:
                        self.zkey ^= Z_EP[self.ep_target]
                        self.ep_target = -1
            else:
                self.side_to_move, self.moves_remaining = save
        return token

    def unmake(self, token) -> None:
        m, captured, castling, ep, mr, side, winner, zkey = token
        self._unmove_piece_bits(m, captured)
        self.castling = castling
        self.ep_target = ep
        self.moves_remaining = mr
        self.side_to_move = side
        self.winner = winner
        self.zkey = zkey

    def make_sa(self, m: int):
        """Single-agent apply: board, castling and ep bookkeeping only; the
        turn clock is frozen.  Used by the capture oracle and reachability."""
        token = (m, 0, self.castling, self.ep_target, self.moves_remaining,
                 self.side_to_move, self.winner, self.zkey)
        captured = self._move_piece_bits(m)
        frm = m & 63
        to = (m >> 6) & 63
        mk = (m >> 15) & 7
        z = self.zkey
        new_castle = self.castling & _CR_TOUCH[frm] & _CR_TOUCH[to]
        if new_castle != self.castling:
            z ^= Z_CASTLE[self.castling] ^ Z_CASTLE[new_castle]
            self.castling = new_castle
        old_ep = self.ep_target
        if mk == MK_DOUBLE:
            new_ep = (frm + to) >> 1
        elif self.config.ep_rule == "strict" or mk == MK_EP:
            new_ep = -1
        else:
            new_ep = old_ep
        if new_ep != old_ep:
            if old_ep != -1:
                z ^= Z_EP[old_ep]
            if new_ep != -1:
                z ^= Z_EP[new_ep]
            self.ep_target = new_ep
        self.zkey = z
        return (token, captured)

    def unmake_sa(self, sa_token) -> None:
        token, captured = sa_token
        m = token[0]
        self._unmove_piece_bits(m, captured)
        self.castling = token[2]
        self.ep_target = token[3]
        self.zkey = token[7]

    # -- legality classification -------------------------------------------------

    def illegal_reason(self, m: int) -> Optional[str]:
        """None if m is legal here, else a stable reason code."""
        if self.winner is not None:
            return "terminal-position"
        frm = m & 63
        to = (m >> 6) & 63
        code = self.piece_at[frm]
        if not code:
            return "empty-origin"
        if code_color(code) != self.side_to_move:
            return "wrong-side"
        if self.occ[self.side_to_move] & (1 << to):
            return "friendly-capture"
        if m in self.gen_moves():
            return None
        mk = (m >> 15) & 7
        kind = code_kind(code)
        if mk in (MK_CASTLE_K, MK_CASTLE_Q):
            return "castling-unavailable"
        if mk == MK_EP:
            return "ep-unavailable"
        promo = (m >> 12) & 7
        if kind == PAWN:
            last = 7 if self.side_to_move == WHITE else 0
            if (to >> 3) == last and not promo:
                return "bad-promotion"
            if (to >> 3) != last and promo:
                return "bad-promotion"
        if kind in (BISHOP, ROOK, QUEEN):
            dirs = {BISHOP: _BISHOP_DIRS, ROOK: _ROOK_DIRS,
                    QUEEN: _ROOK_DIRS + _BISHOP_DIRS}[kind]
            if 1 << to & _slide_attacks(frm, 0, dirs):
                return "blocked-path"
        if kind == PAWN:
            # Pushes blocked by any piece; diagonals need a capture target.
            step = 8 if self.side_to_move == WHITE else -8
            if to == frm + step or to == frm + 2 * step:
                return "blocked-path"
        return "bad-geometry"


# ---------------------------------------------------------------------------
# Public pure-function API


def initial_position(config: TurnConfig) -> Position:
    """Standard starting array; White on move with its full allowance."""
    return Position.initial(config)


def legal_moves(position: Position) -> List[Move]:
    """Every legal single move in canonical order (king captures, captures,
    quiet moves; each sub-ordered by long-algebraic text).  Empty if terminal."""
    return [Move.from_packed(m) for m in position.gen_moves_sorted()]


def apply_move(position: Position, move: Move) -> Position:
    pos, _tok = apply_move_with_token(position, move)
    return pos


def apply_move_with_token(position: Position, move: Move):
    """Apply a legal move, returning (new_position, undo_token).

    The input position is not modified.  Illegal moves raise
    IllegalMoveError with a reason code."""
    m = _resolve_packed(position, move)
    reason = position.illegal_reason(m)
    if reason is not None:
        raise IllegalMoveError(reason, move.text)
    pos = position.copy()
    token = pos.make(m)
    return pos, token


def undo_move(position: Position, move: Move, undo_token) -> Position:
    """Exact inverse of the apply that produced undo_token (bit-identical)."""
    if not isinstance(undo_token, tuple) or len(undo_token) != 8:
        raise ValueError("bad undo token")
    m = undo_token[0]
    if (m & 63) != move.from_square.index or ((m >> 6) & 63) != move.to_square.index \
            or ((m >> 12) & 7) != (move.promotion or 0) \
            or (move.kind and ((m >> 15) & 7) != move.kind):
        raise ValueError("undo token does not match move")
    # position must be the state the move produced: origin empty, target held.
    if position.piece_at[move.from_square.index] != 0 \
            or position.piece_at[move.to_square.index] == 0:
        raise ValueError("undo token does not match position")
    pos = position.copy()
    pos.unmake(undo_token)
    return pos


def _resolve_packed(position: Position, move: Move) -> int:
    """Fill in the move-kind flags from the board when the caller left them
    defaulted (e.g. moves built from text)."""
    frm = move.from_square.index
    to = move.to_square.index
    promo = move.promotion or 0
    code = position.piece_at[frm]
    kind = code_kind(code) if code else 0
    mk = move.kind
    if mk == MK_QUIET:
        if kind == KING and frm in (E1, E8) and to - frm == 2:
            mk = MK_CASTLE_K
        elif kind == KING and frm in (E1, E8) and frm - to == 2:
            mk = MK_CASTLE_Q
        elif kind == PAWN and abs(to - frm) == 16:
            mk = MK_DOUBLE
        elif kind == PAWN and to == position.ep_target and (frm & 7) != (to & 7) \
                and not position.piece_at[to]:
            mk = MK_EP
        elif position.piece_at[to]:
            mk = MK_CAPTURE
    return pack_move(frm, to, promo, mk)


def attacked_squares(position: Position, by: int) -> set:
    """Squares a piece of `by` could capture on in one move."""
    return {Square.from_index(s) for s in _bits(position.attacked_bb(by))}


def winner_of(position: Position) -> Optional[int]:
    """The color whose opponent's king is absent, else None."""
    wk = position.bb[WK] != 0
    bk = position.bb[BK] != 0
    if not wk and not bk:
        raise RulesError("both kings absent")
    if not bk:
        return WHITE
    if not wk:
        return BLACK
    return None


def mirrored(position: Position) -> Position:
    """Rank-flip with colors, rights, allowances and winner swapped."""
    pieces = {}
    for sq, piece in position.piece_map().items():
        msq = Square(sq.file, 7 - sq.rank)
        pieces[msq] = Piece(piece.color ^ 1, piece.kind)
    castling = 0
    if position.castling & CR_WK:
        castling |= CR_BK
    if position.castling & CR_WQ:
        castling |= CR_BQ
    if position.castling & CR_BK:
        castling |= CR_WK
    if position.castling & CR_BQ:
        castling |= CR_WQ
    ep = None
    if position.ep_target != -1:
        ep = Square(position.ep_target & 7, 7 - (position.ep_target >> 3))
    pos = Position(position.config.mirrored())
    for sq, piece in pieces.items():
        pos._put(sq.index, piece_code(piece.color, piece.kind))
    pos.side_to_move = position.side_to_move ^ 1
    pos.castling = castling
    pos.ep_target = ep.index if ep else -1
    pos.moves_remaining = position.moves_remaining
    if position.winner is not None:
        pos.winner = position.winner ^ 1
    pos._rehash()
    return pos


def mirror_move(move: Move) -> Move:
    return Move(Square(move.from_square.file, 7 - move.from_square.rank),
                Square(move.to_square.file, 7 - move.to_square.rank),
                move.promotion, move.kind)
