"""CRN emitters: predicate deciders, the fast affine computer, the
piecewise composition, and the graph/search transforms.

Every emitter is pure and deterministic (the same spec yields the same
network, species order included), emits rate constant 1 everywhere, at
most two reactants per reaction, and drops zero-net reactions. Parallel
sub-networks are namespaced with 'scope/' name prefixes and share no
species except their declared interfaces.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .core import Crc, Crd, Crn, Reaction, Species, initial_configuration, vote as vote_of
from .errors import (
    DomainConsistencyError,
    IllFormedFunctionError,
    StructuralError,
    TotalityError,
)
from .semilinear import (
    AffinePiece,
    Guard,
    Mod,
    PiecewiseAffineFn,
    Threshold,
    disambiguate_guards,
    eval_fn,
)
from .verifier import inputs_up_to_norm


@dataclass(frozen=True)
class CompileOptions:
    """scope_prefix namespaces every emitted species; fanout_width is the
    computed number of parallel consumers per input (filled by the
    piecewise compiler)."""

    scope_prefix: str = ""
    fanout_width: int = 0


@dataclass(frozen=True)
class VoterBinding:
    """Concrete voter species driving piece activation, one list per vote."""

    yes_species: tuple[str, ...]
    no_species: tuple[str, ...]


class _Net:
    """Deterministic network builder: species register on first use."""

    def __init__(self, prefix: str = ""):
        self.prefix = prefix
        self._order: list[str] = []
        self._seen: set[str] = set()
        self.reactions: list[Reaction] = []
        self.context: dict[str, int] = {}

    def sp(self, name: str) -> str:
        full = self.prefix + name
        if full not in self._seen:
            self._seen.add(full)
            self._order.append(full)
        return full

    def rxn(self, reactants: Mapping[str, int], products: Mapping[str, int]):
        r = Reaction(reactants, products)
        if r.reactants == r.products:
            return  # zero net effect: legal in the model, pointless to emit
        self.reactions.append(r)

    def seed(self, name: str, count: int):
        if count > 0:
            self.context[name] = self.context.get(name, 0) + count

    def crn(self) -> Crn:
        return Crn([Species(n) for n in self._order], self.reactions)

    def absorb(self, crn: Crn, context: Mapping[str, int]):
        """Splice a compiled sub-network in, species order preserved."""
        for name in crn.species_names:
            if name not in self._seen:
                self._seen.add(name)
                self._order.append(name)
        self.reactions.extend(crn.reactions)
        for name, count in context.items():
            self.context[name] = self.context.get(name, 0) + count


def _default_inputs(k: int) -> tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(k))


def _rel_truth(total: int, rel: str, const: int) -> bool:
    return {
        "<": total < const,
        "<=": total <= const,
        "=": total == const,
        ">=": total >= const,
        ">": total > const,
    }[rel]


def compile_threshold(
    coeffs: Sequence[int],
    rel: str,
    const: int,
    inputs: Sequence[str] | None = None,
    prefix: str = "",
) -> Crd:
    """Token-cancellation decider for sum(coeffs * x) <rel> const.

    Inputs convert to P (positive weight) or N (negative) tokens; the
    initial context holds |const| tokens on the opposing side, P and N
    cancel into the tie token T, and a single leader revotes catalytically
    on P or N but consumes T. Leftover P means the sum exceeds const,
    leftover N means it falls short, full cancellation means equality; the
    leader's state maps each case to the relation's truth. With all-zero
    coefficients this degenerates naturally to a constant-vote decider.
    """
    coeffs = [int(a) for a in coeffs]
    net = _Net(prefix)
    names = tuple(inputs) if inputs is not None else _default_inputs(len(coeffs))
    if len(names) != len(coeffs):
        raise StructuralError("coefficient/input arity mismatch")
    xs = [net.sp(n) for n in names]
    l1, l0 = net.sp("L1"), net.sp("L0")
    leader = {1: l1, 0: l0}

    vote_p = 1 if rel in (">", ">=") else 0
    vote_n = 1 if rel in ("<", "<=") else 0
    vote_t = 1 if rel in ("=", "<=", ">=") else 0

    p = n = t = None
    if any(a > 0 for a in coeffs) or const < 0:
        p = net.sp("P")
    if any(a < 0 for a in coeffs) or const > 0:
        n = net.sp("N")
    for x, a in zip(xs, coeffs):
        if a > 0:
            net.rxn({x: 1}, {p: a})
        elif a < 0:
            net.rxn({x: 1}, {n: -a})
    if p is not None and n is not None:
        t = net.sp("T")
        net.rxn({p: 1, n: 1}, {t: 1})
    if p is not None:
        net.rxn({leader[1 - vote_p]: 1, p: 1}, {leader[vote_p]: 1, p: 1})
    if n is not None:
        net.rxn({leader[1 - vote_n]: 1, n: 1}, {leader[vote_n]: 1, n: 1})
    if t is not None:
        net.rxn({l0: 1, t: 1}, {leader[vote_t]: 1})
        net.rxn({l1: 1, t: 1}, {leader[vote_t]: 1})

    net.seed(leader[1 if _rel_truth(0, rel, const) else 0], 1)
    if const > 0:
        net.seed(n, const)
    elif const < 0:
        net.seed(p, -const)
    return Crd(net.crn(), xs, {l1: 1, l0: 0}, net.context)


def compile_mod(
    coeffs: Sequence[int],
    modulus: int,
    residue: int,
    inputs: Sequence[str] | None = None,
    prefix: str = "",
) -> Crd:
    """Leader automaton for sum(coeffs * x) = residue (mod modulus).

    One leader walks states L0..L{m-1}, consuming one input molecule per
    step and advancing by that input's coefficient; every state votes, so
    the vote is always defined and stabilizes when the inputs are gone.
    """
    coeffs = [int(a) for a in coeffs]
    m, r = int(modulus), int(residue) % int(modulus)
    net = _Net(prefix)
    names = tuple(inputs) if inputs is not None else _default_inputs(len(coeffs))
    if len(names) != len(coeffs):
        raise StructuralError("coefficient/input arity mismatch")
    xs = [net.sp(n) for n in names]
    states = [net.sp(f"L{s}") for s in range(m)]
    for x, a in zip(xs, coeffs):
        for s in range(m):
            net.rxn({states[s]: 1, x: 1}, {states[(s + a) % m]: 1})
    net.seed(states[0], 1)
    voters = {states[s]: (1 if s == r else 0) for s in range(m)}
    return Crd(net.crn(), xs, voters, net.context)


def _compile_atom(atom, inputs: Sequence[str], prefix: str) -> Crd:
    if isinstance(atom, Threshold):
        return compile_threshold(atom.coeffs, atom.rel, atom.const, inputs, prefix)
    if isinstance(atom, Mod):
        return compile_mod(atom.coeffs, atom.modulus, atom.residue, inputs, prefix)
    raise StructuralError(f"unknown atom {atom!r}")


def _initial_vote(crd: Crd) -> int:
    """Vote of the decider's initial context (inputs at zero)."""
    config = initial_configuration(crd, (0,) * len(crd.input_species))
    v = vote_of(crd, config)
    if v == "yes":
        return 1
    if v == "no":
        return 0
    raise StructuralError("decider context has no defined initial vote")


def compile_guard(guard: Guard, k: int, inputs: Sequence[str] | None = None, prefix: str = "") -> Crd:
    """Decider for a boolean combination of threshold/mod atoms.

    Formulas over a single atom reuse that atom's decider with the vote
    table remapped through the formula (negation and other one-atom
    combinations are a relabeling). Multi-atom formulas fan each input out
    to per-atom copies and add a combiner leader over atom-vote vectors,
    updated catalytically from the atoms' voters; the combiner states are
    the voters, voting the formula's value at their vector.
    """
    names = tuple(inputs) if inputs is not None else _default_inputs(k)
    if len(names) != k:
        raise StructuralError("input name count differs from arity")
    atoms = guard.atoms()
    for atom in atoms:
        if len(atom.coeffs) != k:
            raise StructuralError("atom arity differs from guard arity")

    if not atoms:
        net = _Net(prefix)
        xs = [net.sp(n) for n in names]
        value = guard.eval_with({})
        voter = net.sp("L1" if value else "L0")
        net.seed(voter, 1)
        return Crd(net.crn(), xs, {voter: 1 if value else 0}, net.context)

    if len(atoms) == 1:
        atom = atoms[0]
        sub = _compile_atom(atom, names, prefix)
        remapped = {
            w: int(guard.eval_with({atom: bool(b)})) for w, b in sub.voters.items()
        }
        return Crd(sub.crn, sub.input_species, remapped, sub.initial_context)

    net = _Net(prefix)
    xs = [net.sp(n) for n in names]
    subs = [_compile_atom(atom, names, f"{prefix}a{t}/") for t, atom in enumerate(atoms)]
    for i in range(k):
        consumers = [t for t, atom in enumerate(atoms) if atom.coeffs[i] != 0]
        if consumers:
            net.rxn({xs[i]: 1}, {subs[t].input_species[i]: 1 for t in consumers})
    for sub in subs:
        net.absorb(sub.crn, sub.initial_context)

    states = {}
    for bits in _bit_vectors(len(atoms)):
        states[bits] = net.sp("C" + "".join(map(str, bits)))
    for bits in _bit_vectors(len(atoms)):
        for t, sub in enumerate(subs):
            b = 1 - bits[t]
            flipped = bits[:t] + (b,) + bits[t + 1 :]
            for w, phi in sub.voters.items():
                if phi == b:
                    net.rxn({states[bits]: 1, w: 1}, {states[flipped]: 1, w: 1})
    v0 = tuple(_initial_vote(sub) for sub in subs)
    net.seed(states[v0], 1)
    voters = {
        states[bits]: int(guard.eval_with({a: bool(v) for a, v in zip(atoms, bits)}))
        for bits in _bit_vectors(len(atoms))
    }
    return Crd(net.crn(), xs, voters, net.context)


def _bit_vectors(t: int) -> list[tuple[int, ...]]:
    out = []
    for code in range(1 << t):
        out.append(tuple((code >> (t - 1 - i)) & 1 for i in range(t)))
    return out


def _affine_expansion(piece: AffinePiece) -> int:
    """Max molecules one input unit can become inside the affine network."""
    per_input = [sum(abs(piece.num[j][i]) for j in range(piece.l)) for i in range(piece.k)]
    return max(1, max(per_input, default=1))


def compile_affine(
    piece: AffinePiece,
    opts: CompileOptions | None = None,
    inputs: Sequence[str] | None = None,
    prefix: str = "",
) -> Crc:
    """Fast affine computer for the split encoding (Y^P, Y^C).

    Emits the offset chains (C leaders absorb the first c_i copies of each
    input), the per-output input copies, the coefficient conversions into
    Z^P/Z^C tokens and the D-leader division chains releasing one Y for
    every d_j tokens. Output molecules are only ever produced, never
    consumed, and the declared count bound is linear in the input size.
    """
    if opts is not None and opts.scope_prefix:
        prefix = opts.scope_prefix + prefix
    net = _Net(prefix)
    names = tuple(inputs) if inputs is not None else _default_inputs(piece.k)
    xs = [net.sp(n) for n in names]
    k, l = piece.k, piece.l

    y_p = [net.sp(f"Y{j + 1}^P") for j in range(l)]
    y_c = [net.sp(f"Y{j + 1}^C") for j in range(l)]
    for j in range(l):
        net.seed(y_p[j], piece.b[j])

    for i in range(k):
        chain = [net.sp(f"C{i + 1}^{m}") for m in range(piece.c[i] + 1)]
        net.seed(chain[0], 1)
        for m in range(piece.c[i]):
            net.rxn({chain[m]: 1, xs[i]: 1}, {chain[m + 1]: 1})
        x_prime = net.sp(f"X{i + 1}'")
        net.rxn({chain[-1]: 1, xs[i]: 1}, {chain[-1]: 1, x_prime: 1})
        copies = {net.sp(f"X{i + 1}_{j + 1}"): 1 for j in range(l) if piece.num[j][i] != 0}
        net.rxn({x_prime: 1}, copies)
        for j in range(l):
            n_ij = piece.num[j][i]
            if n_ij > 0:
                net.rxn({net.sp(f"X{i + 1}_{j + 1}"): 1}, {net.sp(f"Z{j + 1}^P"): n_ij})
            elif n_ij < 0:
                net.rxn({net.sp(f"X{i + 1}_{j + 1}"): 1}, {net.sp(f"Z{j + 1}^C"): -n_ij})

    for j in range(l):
        for kind, y in (("P", y_p[j]), ("C", y_c[j])):
            z = net.sp(f"Z{j + 1}^{kind}")
            chain = [net.sp(f"D{j + 1}^{m}{kind}") for m in range(piece.den[j])]
            net.seed(chain[0], 1)
            for m in range(piece.den[j]):
                if m < piece.den[j] - 1:
                    net.rxn({chain[m]: 1, z: 1}, {chain[m + 1]: 1})
                else:
                    net.rxn({chain[m]: 1, z: 1}, {chain[0]: 1, y: 1})

    c0 = sum(piece.b) + k + 2 * l
    col_max = max(
        (sum(abs(piece.num[j][i]) for i in range(k)) for j in range(l)), default=0
    )
    c1 = 1 + max(col_max, _affine_expansion(piece))
    return Crc(
        net.crn(),
        xs,
        tuple(y_p + y_c),
        net.context,
        declared_count_bound=(c0, c1),
    )


def _reduced_piece(piece: AffinePiece) -> tuple[AffinePiece, list[int]]:
    """Drop inputs with all-zero coefficients; they cannot affect the value."""
    active = [i for i in range(piece.k) if any(piece.num[j][i] for j in range(piece.l))]
    if len(active) == piece.k:
        return piece, active
    num = tuple(tuple(row[i] for i in active) for row in piece.num)
    c = tuple(piece.c[i] for i in active)
    reduced = AffinePiece(len(active), piece.l, num, piece.den, piece.b, c, Guard.true())
    return reduced, active


def compile_piecewise(fn: PiecewiseAffineFn, opts: CompileOptions | None = None) -> tuple[Crc, CompileOptions]:
    """Full composition: parallel affine computers, guard deciders, and the
    activation layer that copies exactly one piece's split outputs into the
    global output counts.

    Guards are disambiguated first (piece i requires its own guard and the
    negation of all earlier ones), so exactly one decider stabilizes to
    yes. Its voters activate the piece's inactive outputs, minting one
    global Y_j per activated Y^P unit; no-voters of the other deciders
    deactivate theirs, reclaiming the minted Y_j, and leftover Y^P/Y^C
    pairs annihilate through K_j which also reclaims a Y_j.
    """
    prefix = opts.scope_prefix if opts else ""
    fn2 = disambiguate_guards(fn)
    k, l = fn2.k, fn2.l
    for x in inputs_up_to_norm(k, 3):
        try:
            eval_fn(fn2, x)
        except TotalityError:
            raise TotalityError(
                f"piece guards do not cover input {x}; the composition "
                "requires a total function"
            ) from None
        except (DomainConsistencyError, IllFormedFunctionError):
            pass  # some guard held, which is all totality asks of x

    net = _Net(prefix)
    xs = [net.sp(n) for n in fn2.input_names]
    ys = [net.sp(f"Y{j + 1}") for j in range(l)]

    pieces = []
    for i, piece in enumerate(fn2.pieces):
        reduced, active = _reduced_piece(piece)
        sub_inputs = [f"X{t + 1}" for t in active]
        sub = compile_affine(reduced, inputs=sub_inputs, prefix=f"{prefix}p{i + 1}/")
        pieces.append((sub, active))
    guards = [
        compile_guard(piece.guard, k, inputs=None, prefix=f"{prefix}g{i + 1}/")
        for i, piece in enumerate(fn2.pieces)
    ]

    fanout = 0
    for t in range(k):
        targets: dict[str, int] = {}
        for sub, active in pieces:
            if t in active:
                targets[sub.input_species[active.index(t)]] = 1
        for guard in guards:
            name = guard.input_species[t]
            if any(name in rxn.species_names() for rxn in guard.crn.reactions):
                targets[name] = 1
        if targets:
            net.rxn({xs[t]: 1}, targets)
            fanout = max(fanout, len(targets))

    for sub, _ in pieces:
        net.absorb(sub.crn, sub.initial_context)
    for guard in guards:
        net.absorb(guard.crn, guard.initial_context)

    bindings = [
        VoterBinding(
            yes_species=tuple(w for w, b in guard.voters.items() if b == 1),
            no_species=tuple(w for w, b in guard.voters.items() if b == 0),
        )
        for guard in guards
    ]

    ks = [net.sp(f"K{j + 1}") for j in range(l)]
    for i, (sub, _) in enumerate(pieces):
        pp = f"{prefix}p{i + 1}/"
        binding = bindings[i]
        for j in range(l):
            inact_p = f"{pp}Y{j + 1}^P"
            act_p = net.sp(f"{pp}Y{j + 1}^P_on")
            inact_c = f"{pp}Y{j + 1}^C"
            act_c = net.sp(f"{pp}Y{j + 1}^C_on")
            m = net.sp(f"{pp}M{j + 1}")
            for v in binding.yes_species:
                net.rxn({v: 1, inact_p: 1}, {v: 1, act_p: 1, ys[j]: 1})
                net.rxn({v: 1, inact_c: 1}, {v: 1, act_c: 1})
            for w in binding.no_species:
                net.rxn({w: 1, act_p: 1}, {w: 1, m: 1})
                net.rxn({w: 1, act_c: 1}, {w: 1, inact_c: 1})
            net.rxn({m: 1, ys[j]: 1}, {inact_p: 1})
            net.rxn({act_p: 1, act_c: 1}, {ks[j]: 1})
    for j in range(l):
        net.rxn({ks[j]: 1, ys[j]: 1}, {})

    c0 = sum(net.context.values()) + sum(sum(p.b) for p in fn2.pieces)
    c1 = 1 + sum(2 * _affine_expansion(p) for p in fn2.pieces) + sum(
        _guard_expansion(g) for g in fn2.pieces
    )
    crc = Crc(net.crn(), xs, ys, net.context, declared_count_bound=(c0, c1))
    out_opts = replace(opts or CompileOptions(), fanout_width=fanout)
    return crc, out_opts


def _guard_expansion(piece: AffinePiece) -> int:
    total = 0
    for atom in piece.guard.atoms():
        if isinstance(atom, Threshold):
            total += max(1, max((abs(a) for a in atom.coeffs), default=1))
        else:
            total += 1
    return max(1, total)


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name = "gd/" + name
    taken.add(name)
    return name


def graph_decider(crc: Crc) -> Crd:
    """Decider for the graph of the function a computer implements.

    The claimed outputs arrive as extra inputs Y_j^C; every reaction that
    nets production or consumption of an output is instrumented to also
    emit matching Y_j^P / Y_j^C bookkeeping tokens, which cancel against
    the claim. A yes-leader survives exactly when every coordinate cancels.
    """
    taken = set(crc.crn.species_names)
    y_p = {y: _fresh(f"{y}^P", taken) for y in crc.output_species}
    y_c = {y: _fresh(f"{y}^C", taken) for y in crc.output_species}
    l1 = _fresh("L1", taken)
    l0 = _fresh("L0", taken)

    reactions = []
    for rxn in crc.crn.reactions:
        delta = rxn.net()
        extra: dict[str, int] = {}
        for y in crc.output_species:
            d = delta.get(y, 0)
            if d > 0:
                extra[y_p[y]] = d
            elif d < 0:
                extra[y_c[y]] = -d
        if extra:
            products = dict(rxn.products)
            for name, count in extra.items():
                products[name] = products.get(name, 0) + count
            reactions.append(Reaction(dict(rxn.reactants), products, rxn.rate_constant))
        else:
            reactions.append(rxn)
    for y in crc.output_species:
        reactions.append(Reaction({y_p[y]: 1, y_c[y]: 1}, {l1: 1}))
        reactions.append(Reaction({y_p[y]: 1, l1: 1}, {y_p[y]: 1, l0: 1}))
        reactions.append(Reaction({y_c[y]: 1, l1: 1}, {y_c[y]: 1, l0: 1}))
    reactions.append(Reaction({l0: 1, l1: 1}, {l1: 1}))

    species = list(crc.crn.species_names)
    for y in crc.output_species:
        species.extend([y_p[y], y_c[y]])
    species.extend([l1, l0])
    crn = Crn([Species(n) for n in species], reactions)
    inputs = tuple(crc.input_species) + tuple(y_c[y] for y in crc.output_species)
    context = dict(crc.initial_context)
    context[l1] = 1
    return Crd(crn, inputs, {l1: 1, l0: 0}, context)


def two_voter_form(crd: Crd) -> Crd:
    """Wrap a many-voter decider in the two-voter convention.

    Adds a mirror leader pair updated catalytically from the existing
    voters; the pair becomes the only voters. No-op when the decider
    already has exactly one yes and one no voter.
    """
    yes = [w for w, b in crd.voters.items() if b == 1]
    no = [w for w, b in crd.voters.items() if b == 0]
    if len(yes) == 1 and len(no) == 1:
        return crd
    taken = set(crd.crn.species_names)
    v1 = _fresh("V1", taken)
    v0 = _fresh("V0", taken)
    reactions = list(crd.crn.reactions)
    for w in sorted(yes):
        reactions.append(Reaction({v0: 1, w: 1}, {v1: 1, w: 1}))
    for w in sorted(no):
        reactions.append(Reaction({v1: 1, w: 1}, {v0: 1, w: 1}))
    species = list(crd.crn.species_names) + [v1, v0]
    crn = Crn([Species(n) for n in species], reactions)
    context = dict(crd.initial_context)
    context[{1: v1, 0: v0}[_initial_vote(crd)]] = 1
    return Crd(crn, crd.input_species, {v1: 1, v0: 0}, context)


def search_crc(crd: Crd, k: int, l: int) -> Crc:
    """Random-search computer from a decider of the difference encoding.

    The decider's inputs must be (x_1..x_k, Y_1^P.., Y_1^C..); while the
    no-voter is present the search bumps outputs up (minting a Y_j^P and a
    visible Y_j) or down (retiring a visible Y_j into a Y_j^C). The
    reachable space is unbounded, so the result carries bounded=False and
    kinetics/verification refuse it.
    """
    yes = [w for w, b in crd.voters.items() if b == 1]
    no = [w for w, b in crd.voters.items() if b == 0]
    if len(yes) != 1 or len(no) != 1:
        raise StructuralError("search construction needs the two-voter convention")
    if len(crd.input_species) != k + 2 * l:
        raise StructuralError(
            f"decider has {len(crd.input_species)} inputs, expected k+2l = {k + 2 * l}"
        )
    l0 = no[0]
    taken = set(crd.crn.species_names)
    ys = [_fresh(f"Y{j + 1}", taken) for j in range(l)]
    reactions = list(crd.crn.reactions)
    for j in range(l):
        yp = crd.input_species[k + j]
        yc = crd.input_species[k + l + j]
        reactions.append(Reaction({l0: 1}, {l0: 1, yp: 1, ys[j]: 1}))
        reactions.append(Reaction({l0: 1, ys[j]: 1}, {l0: 1, yc: 1}))
    species = list(crd.crn.species_names) + ys
    crn = Crn([Species(n) for n in species], reactions)
    return Crc(
        crn,
        tuple(crd.input_species[:k]),
        tuple(ys),
        dict(crd.initial_context),
        bounded=False,
    )


def _lift_guard(guard: Guard, k: int, total: int) -> Guard:
    """Extend every atom's coefficient vector from k to total inputs."""
    if guard.kind == "true":
        return guard
    if guard.kind == "atom":
        atom = guard.atom
        coeffs = tuple(atom.coeffs) + (0,) * (total - k)
        if isinstance(atom, Threshold):
            return Guard.of(Threshold(coeffs, atom.rel, atom.const))
        return Guard.of(Mod(coeffs, atom.modulus, atom.residue))
    return Guard(guard.kind, children=tuple(_lift_guard(c, k, total) for c in guard.children))


def difference_graph_guard(fn: PiecewiseAffineFn) -> Guard:
    """Membership formula of the difference encoding of fn's graph.

    Over (x, yP, yC): some disambiguated piece's guard holds at x, the
    input offsets are covered, and for each output j the piece equation
    d_j(yP_j - yC_j) = d_j b_j + sum_i n_ij (x_i - c_i) holds.
    """
    fn2 = disambiguate_guards(fn)
    k, l = fn2.k, fn2.l
    total = k + 2 * l
    branches = []
    for piece in fn2.pieces:
        parts = [_lift_guard(piece.guard, k, total)]
        for i in range(k):
            if piece.c[i] > 0:
                coeffs = tuple(1 if t == i else 0 for t in range(total))
                parts.append(Guard.of(Threshold(coeffs, ">=", piece.c[i])))
        for j in range(l):
            coeffs = [0] * total
            for i in range(k):
                coeffs[i] = piece.num[j][i]
            coeffs[k + j] = -piece.den[j]
            coeffs[k + l + j] = piece.den[j]
            const = sum(piece.num[j][i] * piece.c[i] for i in range(k)) - piece.den[j] * piece.b[j]
            parts.append(Guard.of(Threshold(tuple(coeffs), "=", const)))
        branches.append(Guard.and_(*parts))
    return Guard.or_(*branches)


def compile_search(fn: PiecewiseAffineFn, opts: CompileOptions | None = None) -> Crc:
    """Search backend: decider for the difference-encoded graph plus the
    output-guessing reactions. Compile-only; the result is unbounded."""
    prefix = opts.scope_prefix if opts else ""
    k, l = fn.k, fn.l
    names = tuple(fn.input_names) + tuple(
        f"Y{j + 1}^P" for j in range(l)
    ) + tuple(f"Y{j + 1}^C" for j in range(l))
    guard = difference_graph_guard(fn)
    decider = compile_guard(guard, k + 2 * l, inputs=names, prefix=prefix)
    return search_crc(two_voter_form(decider), k, l)
