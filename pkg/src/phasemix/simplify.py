"""Deterministic peephole simplification of gate-list circuits.

The engine keeps a doubly-linked node per gate, threaded both globally and
per wire, and applies unitary-preserving rewrites until a fixed point:

- inverse-pair cancellation (H.H and CNOT.CNOT) through commuting
  intermediates within a bounded window;
- fusion of Z-diagonal runs on a wire (S and Z-phases commute past CNOT
  controls), renormalized through ``normalize_phase`` and only applied when
  it strictly shrinks (gate count, then Z-phase count);
- removal of identity Z-phases.

Commutation is decided per shared wire by role: S/Z-phase and CNOT controls
act diagonally ("z"), CNOT targets act as bit flips ("x"), H matches nothing.
Two gates commute when every shared wire has matching roles, which is exact
on this gate set.

The ``aggressive`` strategy additionally bubbles every Z-diagonal gate as far
left as commutation allows before each rewrite pass, exposing fusions across
different wire interleavings.  Every rewrite is an exact circuit identity, so
both strategies preserve the unitary (identity removal is exact up to the
1e-12 angle floor).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import pi

from .circuit import CNOT, H, S, ZPHASE, Circuit, Gate, normalize_phase, two_qubit_count

ANGLE_EPS = 1e-12

_RULES = ("drop_identity", "fuse_diagonals", "cancel_pairs")


@dataclass(frozen=True, slots=True)
class Strategy:
    """Named rewrite configuration; rules run in order at each examined gate."""

    name: str
    rules: tuple[str, ...] = _RULES
    commute_left: bool = False
    window: int = 64
    max_cycles: int = 32


BASIC = Strategy("basic")
AGGRESSIVE = Strategy("aggressive", commute_left=True)
STRATEGIES = {"basic": BASIC, "aggressive": AGGRESSIVE}


def _role(gate: Gate, wire: int) -> str | None:
    if gate.kind == CNOT:
        return "z" if gate.qubits[0] == wire else "x"
    if gate.kind == H:
        return None
    return "z"


def _commutes(a: Gate, b: Gate) -> bool:
    for w in a.qubits:
        if w in b.qubits:
            ra, rb = _role(a, w), _role(b, w)
            if ra is None or rb is None or ra != rb:
                return False
    return True


class _Node:
    __slots__ = ("gate", "wires", "nxt", "prv", "gnext", "gprev", "alive")

    def __init__(self, gate: Gate):
        self.gate = gate
        self.wires = gate.qubits
        self.nxt: list[_Node | None] = [None] * len(self.wires)
        self.prv: list[_Node | None] = [None] * len(self.wires)
        self.gnext: _Node | None = None
        self.gprev: _Node | None = None
        self.alive = True

    def slot(self, wire: int) -> int:
        return 0 if self.wires[0] == wire else 1

    def next_on(self, wire: int) -> "_Node | None":
        return self.nxt[0 if self.wires[0] == wire else 1]


class _Engine:
    def __init__(self, n_qubits: int, gates: tuple[Gate, ...], strategy: Strategy):
        self.strategy = strategy
        self.heads: list[_Node | None] = [None] * n_qubits
        self.tails: list[_Node | None] = [None] * n_qubits
        self.ghead: _Node | None = None
        self.gtail: _Node | None = None
        for gate in gates:
            self._append(_Node(gate))

    def _append(self, node: _Node) -> None:
        if self.gtail is None:
            self.ghead = self.gtail = node
        else:
            self.gtail.gnext = node
            node.gprev = self.gtail
            self.gtail = node
        for i, w in enumerate(node.wires):
            tail = self.tails[w]
            node.prv[i] = tail
            if tail is None:
                self.heads[w] = node
            else:
                tail.nxt[tail.slot(w)] = node
            self.tails[w] = node

    def unlink(self, node: _Node) -> None:
        for i, w in enumerate(node.wires):
            p, nx = node.prv[i], node.nxt[i]
            if p is None:
                self.heads[w] = nx
            else:
                p.nxt[p.slot(w)] = nx
            if nx is None:
                self.tails[w] = p
            else:
                nx.prv[nx.slot(w)] = p
        if node.gprev is None:
            self.ghead = node.gnext
        else:
            node.gprev.gnext = node.gnext
        if node.gnext is None:
            self.gtail = node.gprev
        else:
            node.gnext.gprev = node.gprev
        node.alive = False

    def insert_before(self, ref: _Node, gate: Gate) -> _Node:
        # Single-qubit insertions only; ref must touch the gate's wire.
        node = _Node(gate)
        w = gate.qubits[0]
        i_ref = ref.slot(w)
        p = ref.prv[i_ref]
        node.prv[0], node.nxt[0] = p, ref
        if p is None:
            self.heads[w] = node
        else:
            p.nxt[p.slot(w)] = node
        ref.prv[i_ref] = node
        gp = ref.gprev
        node.gprev, node.gnext = gp, ref
        if gp is None:
            self.ghead = node
        else:
            gp.gnext = node
        ref.gprev = node
        return node

    def _wire_neighbors(self, node: _Node) -> list[_Node]:
        out = []
        for i in range(len(node.wires)):
            for other in (node.prv[i], node.nxt[i]):
                if other is not None:
                    out.append(other)
        return out

    # --- rules; each returns nodes to re-examine, or None if no rewrite ---

    def drop_identity(self, node: _Node) -> list[_Node] | None:
        if node.gate.kind != ZPHASE or abs(node.gate.angle) > ANGLE_EPS:
            return None
        touched = self._wire_neighbors(node)
        self.unlink(node)
        return [n for n in touched if n.alive]

    def fuse_diagonals(self, node: _Node) -> list[_Node] | None:
        if node.gate.kind not in (S, ZPHASE):
            return None
        w = node.wires[0]
        run = [node]
        cur = node.next_on(w)
        steps = 0
        while cur is not None and steps < self.strategy.window:
            kind = cur.gate.kind
            if kind in (S, ZPHASE):
                run.append(cur)
            elif _role(cur.gate, w) != "z":
                break
            cur = cur.next_on(w)
            steps += 1
        if len(run) < 2:
            return None
        total = sum(pi / 2 if n.gate.kind == S else n.gate.angle for n in run)
        s_power, alpha = normalize_phase(total)
        keep_z = abs(alpha) > ANGLE_EPS
        out_len = s_power + (1 if keep_z else 0)
        zph_in = sum(1 for n in run if n.gate.kind == ZPHASE)
        zph_out = 1 if keep_z else 0
        if out_len > len(run) or (out_len == len(run) and zph_out >= zph_in):
            return None
        emitted: list[_Node] = []
        for _ in range(s_power):
            emitted.append(self.insert_before(run[0], Gate(S, (w,))))
        if keep_z:
            emitted.append(self.insert_before(run[0], Gate(ZPHASE, (w,), alpha)))
        touched: list[_Node] = []
        for n in run:
            touched.extend(self._wire_neighbors(n))
            self.unlink(n)
        return emitted + [n for n in touched if n.alive]

    def cancel_pairs(self, node: _Node) -> list[_Node] | None:
        gate = node.gate
        if gate.kind == H:
            partner = node.next_on(gate.qubits[0])
            if partner is None or partner.gate.kind != H:
                return None
            touched = self._wire_neighbors(node) + self._wire_neighbors(partner)
            self.unlink(node)
            self.unlink(partner)
            return [n for n in touched if n.alive]
        if gate.kind != CNOT:
            return None
        control, target = gate.qubits
        cur = node.next_on(target)
        steps = 0
        while cur is not None and steps < self.strategy.window:
            other = cur.gate
            if other.kind == CNOT and other.qubits == gate.qubits:
                z = node.next_on(control)
                while z is not cur and z is not None:
                    if _role(z.gate, control) != "z":
                        return None  # blocked on the control wire
                    z = z.next_on(control)
                if z is None:
                    return None
                touched = self._wire_neighbors(node) + self._wire_neighbors(cur)
                self.unlink(node)
                self.unlink(cur)
                return [n for n in touched if n.alive]
            if _role(other, target) != "x":
                return None
            cur = cur.next_on(target)
            steps += 1
        return None

    # --- driver ---

    def run(self) -> tuple[Gate, ...]:
        """Apply rules to a true fixed point.

        A rule outcome depends only on the chains of the examined node's own
        wires, so after the worklist drains it suffices to re-seed the nodes
        on wires touched by a rewrite; when no wire is dirty the circuit is a
        fixed point of every rule.
        """
        queue: deque[_Node] = deque()
        cur = self.ghead
        while cur is not None:
            queue.append(cur)
            cur = cur.gnext
        rules = [getattr(self, name) for name in self.strategy.rules]
        budget = 40 * len(queue) + 400  # belt; the lexicographic measure terminates
        dirty: set[int] = set()
        while budget > 0:
            if not queue:
                if not dirty:
                    break
                for w in sorted(dirty):
                    cur = self.heads[w]
                    while cur is not None:
                        queue.append(cur)
                        cur = cur.next_on(w)
                dirty.clear()
                continue
            node = queue.popleft()
            if not node.alive:
                continue
            for rule in rules:
                touched = rule(node)
                if touched is not None:
                    budget -= 1
                    for other in touched:
                        for w in other.wires:
                            dirty.add(w)
                    for w in node.wires:
                        dirty.add(w)
                    queue.extend(touched)
                    if node.alive:
                        queue.append(node)
                    break
        out: list[Gate] = []
        cur = self.ghead
        while cur is not None:
            out.append(cur.gate)
            cur = cur.gnext
        return tuple(out)


def _bubble_diagonals_left(gates: tuple[Gate, ...], window: int) -> tuple[Gate, ...]:
    """Greedily commute every Z-diagonal gate as far left as allowed.

    Diagonals never cross each other (their relative order is preserved), so
    repeated passes move every diagonal monotonically left and the pass
    converges instead of swapping commuting pairs back and forth.
    """
    out = list(gates)
    for i in range(1, len(out)):
        gate = out[i]
        if gate.kind not in (S, ZPHASE):
            continue
        j = i
        moves = 0
        while j > 0 and moves < window:
            left = out[j - 1]
            if left.kind in (S, ZPHASE) or not _commutes(left, gate):
                break
            out[j] = left
            j -= 1
            moves += 1
        out[j] = gate
    return tuple(out)


def simplify(circuit: Circuit, strategy: Strategy | str = BASIC) -> Circuit:
    """Rewrite to a fixed point of the strategy; unitary preserved, CNOTs never added."""
    if isinstance(strategy, str):
        strategy = STRATEGIES[strategy]
    gates = circuit.gates
    if not strategy.commute_left:
        return Circuit(circuit.n_qubits, _Engine(circuit.n_qubits, gates, strategy).run())
    for _ in range(strategy.max_cycles):
        staged = _bubble_diagonals_left(gates, strategy.window)
        rewritten = _Engine(circuit.n_qubits, staged, strategy).run()
        if rewritten == gates:
            break
        gates = rewritten
    return Circuit(circuit.n_qubits, gates)


def best_simplify(circuit: Circuit) -> Circuit:
    """Best result across strategies: fewest CNOTs, then fewest gates, then strategy order."""
    best: Circuit | None = None
    best_key: tuple[int, int, int] | None = None
    for order, strategy in enumerate((BASIC, AGGRESSIVE)):
        candidate = simplify(circuit, strategy)
        key = (two_qubit_count(candidate), len(candidate.gates), order)
        if best_key is None or key < best_key:
            best, best_key = candidate, key
    assert best is not None
    return best
