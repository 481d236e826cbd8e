"""Regex and NFA-file front-ends.

Regex grammar, loosest binding first::

    alt    := concat ('|' concat)*
    concat := postfix*
    postfix:= atom ('*' | '+' | '?')*
    atom   := letter | '(' alt ')' | '()'

``()`` denotes the empty word.  Regexes are compiled with the inductive
(Thompson) construction, then epsilon transitions are eliminated and the
result is trimmed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .automata import EPSILON, AutomatonError, EpsNfa, Nfa, check_alphabet, trim

EPSILON_TOKENS = ("eps", "ε", "_")


class RegexSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


@dataclass(frozen=True)
class Language:
    """An NFA together with designated initial and final state sets."""

    nfa: Nfa
    initial: frozenset[int]
    final: frozenset[int]

    def accepts(self, word: str) -> bool:
        return self.nfa.accepts(word, self.initial, self.final)


# -- regex -----------------------------------------------------------------


class _Thompson:
    def __init__(self, text: str, alphabet: tuple[str, ...]):
        self.text = text
        self.alphabet = set(alphabet)
        self.pos = 0
        self.count = 0
        self.edges: list[tuple[int, str, int]] = []

    def new(self) -> int:
        self.count += 1
        return self.count - 1

    def peek(self) -> Optional[str]:
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> tuple[int, int]:
        frag = self.alt()
        if self.pos != len(self.text):
            raise RegexSyntaxError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return frag

    def alt(self) -> tuple[int, int]:
        branches = [self.concat()]
        while self.peek() == "|":
            self.pos += 1
            branches.append(self.concat())
        if len(branches) == 1:
            return branches[0]
        start, end = self.new(), self.new()
        for s, e in branches:
            self.edges += [(start, EPSILON, s), (e, EPSILON, end)]
        return start, end

    def concat(self) -> tuple[int, int]:
        parts = []
        while self.peek() not in (None, "|", ")"):
            parts.append(self.postfix())
        if not parts:
            s = self.new()
            return s, s
        for (_, e1), (s2, _) in zip(parts, parts[1:]):
            self.edges.append((e1, EPSILON, s2))
        return parts[0][0], parts[-1][1]

    def postfix(self) -> tuple[int, int]:
        s, e = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.text[self.pos]
            self.pos += 1
            start, end = self.new(), self.new()
            self.edges += [(start, EPSILON, s), (e, EPSILON, end)]
            if op in "*?":
                self.edges.append((start, EPSILON, end))
            if op in "*+":
                self.edges.append((e, EPSILON, s))
            s, e = start, end
        return s, e

    def atom(self) -> tuple[int, int]:
        ch = self.peek()
        if ch is None:
            raise RegexSyntaxError("unexpected end of regex", self.pos)
        if ch == "(":
            self.pos += 1
            if self.peek() == ")":
                self.pos += 1
                s = self.new()
                return s, s
            frag = self.alt()
            if self.peek() != ")":
                raise RegexSyntaxError("expected ')'", self.pos)
            self.pos += 1
            return frag
        if ch in "*+?|)":
            raise RegexSyntaxError(f"unexpected {ch!r}", self.pos)
        if ch not in self.alphabet:
            raise RegexSyntaxError(f"literal {ch!r} not in alphabet", self.pos)
        self.pos += 1
        s, e = self.new(), self.new()
        self.edges.append((s, ch, e))
        return s, e


def eliminate_epsilon(b: Nfa, initial, final) -> Language:
    """Equivalent epsilon-free automaton with the same state set."""
    closures = [b.epsilon_closure([q]) for q in b.states]
    transitions = set()
    for p in b.states:
        for q in closures[p]:
            for sym in b.alphabet:
                for r in b.successors[sym][q]:
                    transitions.add((p, sym, r))
    final = set(final)
    new_final = frozenset(p for p in b.states if not closures[p].isdisjoint(final))
    nfa = Nfa(b.state_count, b.alphabet, frozenset(transitions))
    return Language(nfa, frozenset(initial), new_final)


def parse_regex(text: str, alphabet) -> Language:
    """Compile ``text`` to an epsilon-free, trimmed automaton.

    State 0 is the unique initial state.  The final set may contain several
    states (and contains 0 exactly when the empty word is accepted).
    """
    alphabet = check_alphabet(alphabet)
    builder = _Thompson(text, alphabet)
    start, end = builder.parse()
    raw = EpsNfa(builder.count, alphabet, frozenset(builder.edges))
    lang = eliminate_epsilon(raw, {start}, {end})
    trimmed, mapping = trim(lang.nfa, [start], lang.final)
    # put the initial state first so that it is state 0
    order = sorted(mapping, key=lambda old: (old != start, mapping[old]))
    renum = {old: new for new, old in enumerate(order)}
    inv = {mapping[old]: renum[old] for old in mapping}
    nfa = Nfa(
        trimmed.state_count,
        alphabet,
        frozenset((inv[s], a, inv[d]) for s, a, d in trimmed.transitions),
    )
    final = frozenset(renum[q] for q in lang.final if q in renum)
    return Language(nfa, frozenset({0}), final)


# -- NFA files ---------------------------------------------------------------


@dataclass(frozen=True)
class NfaFile:
    nfa: Nfa
    initial1: frozenset[int]
    final1: frozenset[int]
    initial2: Optional[frozenset[int]] = None
    final2: Optional[frozenset[int]] = None

    @property
    def first(self) -> Language:
        return Language(self.nfa, self.initial1, self.final1)

    @property
    def second(self) -> Optional[Language]:
        if self.initial2 is None or self.final2 is None:
            return None
        return Language(self.nfa, self.initial2, self.final2)


def parse_nfa_file(text: str, allow_epsilon: bool = False) -> NfaFile:
    """Parse the line-oriented NFA format.

    Directives: ``alphabet``, ``states``, ``initial``, ``final``, ``initial2``,
    ``final2``, ``trans <src> <sym> <dst>``.  ``#`` starts a comment.  With
    ``allow_epsilon`` the symbols ``eps``, ``ε`` and ``_`` denote epsilon.
    """
    alphabet = None
    count = None
    sets: dict[str, set[int]] = {}
    trans: list[tuple[int, str, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *args = line.split()
        if head == "alphabet":
            alphabet = check_alphabet(args)
        elif head == "states":
            if len(args) != 1:
                raise AutomatonError(f"line {lineno}: 'states' takes one argument")
            count = _int(args[0], lineno)
        elif head in ("initial", "final", "initial2", "final2"):
            sets.setdefault(head, set()).update(_int(x, lineno) for x in args)
        elif head == "trans":
            if len(args) != 3:
                raise AutomatonError(f"line {lineno}: 'trans' takes <src> <sym> <dst>")
            trans.append((_int(args[0], lineno), args[1], _int(args[2], lineno), lineno))
        else:
            raise AutomatonError(f"line {lineno}: unknown directive {head!r}")
    if alphabet is None:
        raise AutomatonError("missing 'alphabet' directive")
    if count is None:
        raise AutomatonError("missing 'states' directive")
    for name, members in sets.items():
        for q in members:
            if not 0 <= q < count:
                raise AutomatonError(f"state {q} in '{name}' out of range (states {count})")
    transitions = set()
    for src, sym, dst, lineno in trans:
        for q in (src, dst):
            if not 0 <= q < count:
                raise AutomatonError(f"line {lineno}: state {q} out of range (states {count})")
        if allow_epsilon and sym in EPSILON_TOKENS:
            sym = EPSILON
        elif sym not in alphabet:
            raise AutomatonError(f"line {lineno}: symbol {sym!r} not declared")
        transitions.add((src, sym, dst))
    cls = EpsNfa if allow_epsilon else Nfa
    nfa = cls(count, alphabet, frozenset(transitions))
    get = lambda key: frozenset(sets[key]) if key in sets else None  # noqa: E731
    return NfaFile(
        nfa,
        get("initial") or frozenset(),
        get("final") or frozenset(),
        get("initial2"),
        get("final2"),
    )


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise AutomatonError(f"line {lineno}: expected an integer, got {token!r}") from None


def format_nfa_file(nfa: Nfa, initial1, final1, initial2=None, final2=None) -> str:
    lines = [f"alphabet {' '.join(nfa.alphabet)}", f"states {nfa.state_count}"]
    lines.append("initial " + " ".join(map(str, sorted(initial1))))
    lines.append("final " + " ".join(map(str, sorted(final1))))
    if initial2 is not None:
        lines.append("initial2 " + " ".join(map(str, sorted(initial2))))
        lines.append("final2 " + " ".join(map(str, sorted(final2))))
    for s, a, d in sorted(nfa.transitions):
        lines.append(f"trans {s} {a or 'eps'} {d}")
    return "\n".join(lines) + "\n"
