"""Slice-based construction of realizable diagrams and templates.

A wiring is a stack of horizontal slices on k vertical strands.  Every
primitive (kink, braid generator, hook excursion) describes an honest
planar picture, so any composite is a genuine diagram; nothing here is a
formal Gauss code without a realization.

Two assembly modes:

* ``template()`` reads the strands as a string link on an even number of
  strands, the odd ones oriented upward and the even ones downward.

* ``tangle()`` converts the picture to a bottom tangle: component i runs
  from boundary point 2i-1 up its trunk and back down an explicit return
  path to boundary point 2i.  The return descends in the corridor between
  trunk positions i and i+1 and passes under everything, so every hook or
  braid segment that traverses a corridor is recorded as a crossing over
  the corresponding return.  Omitting these crossings would leave codes
  that fail the planarity parity condition (each crossing must interleave
  an even number of others in any closed traversal).

Crossing signs come from det(over direction, under direction), where a
strand's intrinsic direction is the drawing direction times -1 for
downward-oriented strands.  Every passage is stamped with (slice, step);
a strand's trunk passages are that sequence ascending, its return
passages descending, matching traversal along the strand's orientation.
"""

from __future__ import annotations

from ..codec import Diagram, DiagramError, DiagramKind, Passage, Role
from ..tangle_ops import StrandTemplate

_DOWN = (0, -1)


def _det_sign(over: tuple[int, int], under: tuple[int, int]) -> int:
    d = over[0] * under[1] - over[1] * under[0]
    if d == 0:
        raise AssertionError("degenerate crossing directions")
    return 1 if d > 0 else -1


class Wiring:
    def __init__(self, strand_count: int, up: list[bool] | None = None, returns: bool = True):
        self.k = strand_count
        self.up = list(up) if up is not None else [True] * strand_count
        if len(self.up) != strand_count:
            raise DiagramError("orientation list length mismatch")
        # strand s (1-based) currently at position pos_of[s]
        self.pos_of = {s: s for s in range(1, strand_count + 1)}
        self.at = {p: p for p in range(1, strand_count + 1)}
        self.crossings: list[tuple[int, int]] = []
        self.events: dict[int, list[tuple[tuple, Passage]]] = {
            s: [] for s in range(1, strand_count + 1)
        }
        # return paths, one per corridor; corridor c sits between positions
        # c and c+1 and carries the return of the strand landing at 2c
        self.returns_enabled = returns
        self.return_events: dict[int, list[tuple[tuple, Passage]]] = {
            c: [] for c in range(1, strand_count + 1)
        }
        self._slice = 0
        self._step = 0
        self._next_id = 1

    # -- low-level -----------------------------------------------------

    def _new_slice(self):
        self._slice += 1
        self._step = 0

    def _stamp(self, sub: int) -> tuple:
        self._step += 1
        return (self._slice, sub, self._step)

    def _emit(self, over: int, under: int, sign: int, sub: int):
        cid = self._next_id
        self._next_id += 1
        self.crossings.append((cid, sign))
        stamp = self._stamp(sub)
        self.events[over].append((stamp, Passage(cid, Role.OVER)))
        self.events[under].append((stamp, Passage(cid, Role.UNDER)))
        return cid

    def _emit_over_return(self, strand: int, direction: tuple[int, int], corridor: int, sub: int):
        """The given strand segment passes over the return in ``corridor``."""
        if not self.returns_enabled:
            return
        cid = self._next_id
        self._next_id += 1
        self.crossings.append((cid, _det_sign(direction, _DOWN)))
        stamp = self._stamp(sub)
        self.events[strand].append((stamp, Passage(cid, Role.OVER)))
        self.return_events[corridor].append((stamp, Passage(cid, Role.UNDER)))

    def _dir(self, strand: int, drawing: tuple[int, int]) -> tuple[int, int]:
        if self.up[strand - 1]:
            return drawing
        return (-drawing[0], -drawing[1])

    # -- primitives ----------------------------------------------------

    def kink(self, strand: int, sign: int):
        """Reidemeister-I loop on one strand; writhe contribution = sign.
        The loop stays inside the trunk's own lane."""
        self._new_slice()
        cid = self._next_id
        self._next_id += 1
        self.crossings.append((cid, sign))
        self.events[strand].append((self._stamp(0), Passage(cid, Role.OVER)))
        self.events[strand].append((self._stamp(0), Passage(cid, Role.UNDER)))

    def braid(self, position: int, left_over: bool):
        """One braid generator: the strands at ``position`` and
        ``position + 1`` swap, the chosen one in front.  Both diagonal legs
        traverse the corridor between the two positions, passing over its
        return (the descent dodges left of the crossing point)."""
        self._new_slice()
        s_left = self.at[position]
        s_right = self.at[position + 1]
        d_left = self._dir(s_left, (1, 1))
        d_right = self._dir(s_right, (-1, 1))
        self._emit_over_return(s_left, d_left, position, 0)
        if left_over:
            self._emit(s_left, s_right, _det_sign(d_left, d_right), 1)
        else:
            self._emit(s_right, s_left, _det_sign(d_right, d_left), 1)
        self._emit_over_return(s_right, d_right, position, 2)
        self.at[position], self.at[position + 1] = s_right, s_left
        self.pos_of[s_left], self.pos_of[s_right] = position + 1, position

    def hook(self, mover: int, targets: list[int], chirality: int = 1, neck_twist: int = 0):
        """The mover strand reaches sideways and clasps the target cable.

        Going out it passes under every strand in between (an honest R2
        pair each with the return leg), wraps around the targets, and
        returns: under the cable on the way out and over it on the way
        back for chirality +1, the mirror for -1.  Targets must be
        positionally contiguous and on one side of the mover.

        ``neck_twist`` = +-1 puts a half twist in the excursion's neck: the
        outgoing path crosses over the returning path once, with the given
        crossing sign, right where the excursion leaves the trunk.
        """
        if chirality not in (1, -1):
            raise DiagramError("chirality must be +1 or -1")
        if neck_twist not in (0, 1, -1):
            raise DiagramError("neck_twist must be 0, +1 or -1")
        tpos = sorted(self.pos_of[t] for t in targets)
        if tpos != list(range(tpos[0], tpos[0] + len(tpos))):
            raise DiagramError("hook targets must sit at contiguous positions")
        pm = self.pos_of[mover]
        if tpos[0] <= pm <= tpos[-1]:
            raise DiagramError("hook mover may not sit inside the target cable")
        h = 1 if tpos[0] > pm else -1
        self._new_slice()
        out_dir, back_dir = (h, 0), (-h, 0)

        def sweep(direction, sub):
            """Walk from the mover's trunk to just past the cable, yielding
            ('corridor', c) and ('strand', s) stations in x-order."""
            stations = []
            if h > 0:
                for x in range(pm, tpos[-1]):
                    stations.append(("corridor", x))
                    if x + 1 < tpos[0]:
                        stations.append(("strand", self.at[x + 1]))
                    elif x + 1 <= tpos[-1]:
                        stations.append(("target", self.at[x + 1]))
            else:
                for x in range(pm, tpos[0], -1):
                    stations.append(("corridor", x - 1))
                    if x - 1 > tpos[-1]:
                        stations.append(("strand", self.at[x - 1]))
                    elif x - 1 >= tpos[0]:
                        stations.append(("target", self.at[x - 1]))
            if sub == 1:
                stations.reverse()
            mover_under_cable = (chirality > 0) == (sub == 0)
            for kind_, who in stations:
                if kind_ == "corridor":
                    self._emit_over_return(mover, self._dir(mover, direction), who, sub)
                elif kind_ == "strand":
                    d_b = self._dir(who, (0, 1))
                    d_m = self._dir(mover, direction)
                    self._emit(who, mover, _det_sign(d_b, d_m), sub)
                else:
                    d_t = self._dir(who, (0, 1))
                    d_m = self._dir(mover, direction)
                    if mover_under_cable:
                        self._emit(who, mover, _det_sign(d_t, d_m), sub)
                    else:
                        self._emit(mover, who, _det_sign(d_m, d_t), sub)

        twist_id = None
        if neck_twist:
            twist_id = self._next_id
            self._next_id += 1
            self.crossings.append((twist_id, neck_twist))
            self.events[mover].append((self._stamp(0), Passage(twist_id, Role.OVER)))
        sweep(out_dir, 0)
        sweep(back_dir, 1)
        if neck_twist:
            self.events[mover].append((self._stamp(1), Passage(twist_id, Role.UNDER)))

    def cable_hook(
        self,
        movers: list[int],
        target,
        chirality: int = 1,
        turn_twist: int = 0,
        bystander_over: bool = False,
    ):
        """A ribbon of parallel mover strands wraps the target strand.

        All mover strands travel together: out under the target and back
        over it for chirality +1, the mirror for -1.  ``turn_twist`` = 0
        gives the flat hairpin turn (the ribbon edge order reverses on the
        way back); +-1 puts a half twist in the turn, so the edges keep
        their order and cross each other once with the given sign, the
        leading edge in front.  Strands between the cable and the target
        are passed on the same side by both legs of the excursion: under
        them by default, over them with ``bystander_over``.
        """
        if chirality not in (1, -1):
            raise DiagramError("chirality must be +1 or -1")
        if turn_twist not in (0, 1, -1):
            raise DiagramError("turn_twist must be 0, +1 or -1")
        mpos = sorted(self.pos_of[m] for m in movers)
        if mpos != list(range(mpos[0], mpos[0] + len(mpos))):
            raise DiagramError("cable movers must sit at contiguous positions")
        targets = [target] if isinstance(target, int) else list(target)
        tpos = sorted(self.pos_of[t] for t in targets)
        if tpos != list(range(tpos[0], tpos[0] + len(tpos))):
            raise DiagramError("cable_hook targets must sit at contiguous positions")
        if not (tpos[0] > mpos[-1] or tpos[-1] < mpos[0]):
            raise DiagramError("cable_hook target may not overlap the mover cable")
        h = 1 if tpos[0] > mpos[-1] else -1
        self._new_slice()
        # the leg nearest the target bends lowest and leads the ribbon
        ordered = sorted(movers, key=lambda m: self.pos_of[m], reverse=(h > 0))
        out_dir, back_dir = (h, 0), (-h, 0)

        def corridors_and_bystanders(mover):
            pm = self.pos_of[mover]
            near = tpos[0] if h > 0 else tpos[-1]
            stations = []
            if h > 0:
                for x in range(pm, near):
                    stations.append(("corridor", x))
                    if x + 1 < near and self.at[x + 1] not in movers:
                        stations.append(("strand", self.at[x + 1]))
            else:
                for x in range(pm, near, -1):
                    stations.append(("corridor", x - 1))
                    if x - 1 > near and self.at[x - 1] not in movers:
                        stations.append(("strand", self.at[x - 1]))
            return stations

        def pass_stations(mover, stations, direction, sub):
            for kind_, who in stations:
                if kind_ == "corridor":
                    self._emit_over_return(mover, self._dir(mover, direction), who, sub)
                else:
                    d_b = self._dir(who, (0, 1))
                    d_m = self._dir(mover, direction)
                    if bystander_over:
                        self._emit(mover, who, _det_sign(d_m, d_b), sub)
                    else:
                        self._emit(who, mover, _det_sign(d_b, d_m), sub)

        def cross_targets(mover, direction, sub, mover_under):
            # outward the near target leg is met first, backward the far one
            going = sorted(targets, key=lambda t: self.pos_of[t], reverse=(h < 0))
            if direction == back_dir:
                going.reverse()
            d_m = self._dir(mover, direction)
            for t in going:
                d_t = self._dir(t, (0, 1))
                if mover_under:
                    self._emit(t, mover, _det_sign(d_t, d_m), sub)
                else:
                    self._emit(mover, t, _det_sign(d_m, d_t), sub)

        if len(ordered) != 2 and turn_twist:
            raise DiagramError("turn_twist is only defined for two-strand cables")
        # outward: cable edges cross the target in spatial order
        for m in ordered:
            pass_stations(m, corridors_and_bystanders(m), out_dir, 0)
            cross_targets(m, out_dir, 0, chirality > 0)
        if turn_twist:
            # half-twisted turn: the edges cross once and keep their order
            cid = self._next_id
            self._next_id += 1
            self.crossings.append((cid, abs(turn_twist) if turn_twist in (1, -1) else turn_twist))
            self.crossings[-1] = (cid, 1 if turn_twist > 0 else -1)
            first_over = turn_twist > 0
            sub = self._stamp(0)
            if first_over:
                self.events[ordered[0]].append((sub, Passage(cid, Role.OVER)))
                self.events[ordered[1]].append((sub, Passage(cid, Role.UNDER)))
            else:
                self.events[ordered[0]].append((sub, Passage(cid, Role.UNDER)))
                self.events[ordered[1]].append((sub, Passage(cid, Role.OVER)))
            back_order = list(ordered)
        else:
            back_order = list(reversed(ordered))
        for m in back_order:
            cross_targets(m, back_dir, 1, chirality < 0)
            stations = corridors_and_bystanders(m)
            stations.reverse()
            pass_stations(m, stations, back_dir, 1)

    def far_cable_hook(
        self,
        movers: list[int],
        target: int,
        chirality: int = 1,
        edge_mode: int = 0,
        turn_twist: int = 0,
        transit_over: bool = False,
        bystander_over: bool = False,
    ):
        """Like cable_hook, but the ribbon wraps the target from its far
        side: it first transits under the target (and under everything in
        between), turns beyond it, and only then claps it, returning home
        through a second transit.  Only for targets left of the cable.

        ``edge_mode`` selects which ribbon edge leads; ``turn_twist`` puts
        a signed half twist at the far turn (the edges cross once there).
        This is the mirror-position counterpart of cable_hook needed when
        the clasping band sits on the other side of its target.
        """
        if chirality not in (1, -1):
            raise DiagramError("chirality must be +1 or -1")
        mpos = sorted(self.pos_of[m] for m in movers)
        if mpos != list(range(mpos[0], mpos[0] + len(mpos))):
            raise DiagramError("cable movers must sit at contiguous positions")
        pt = self.pos_of[target]
        if pt >= mpos[0]:
            raise DiagramError("far_cable_hook expects the target left of the cable")
        self._new_slice()
        between = [self.at[p] for p in range(mpos[0] - 1, pt, -1)]
        base = sorted(movers, key=lambda m: self.pos_of[m])
        if edge_mode:
            base = list(reversed(base))

        def transit_target(mover, going_left, sub):
            d_m = self._dir(mover, (-1, 0) if going_left else (1, 0))
            d_t = self._dir(target, (0, 1))
            if transit_over:
                self._emit(mover, target, _det_sign(d_m, d_t), sub)
            else:
                self._emit(target, mover, _det_sign(d_t, d_m), sub)

        def cross_target(mover, going_left, mover_under, sub):
            d_m = self._dir(mover, (-1, 0) if going_left else (1, 0))
            d_t = self._dir(target, (0, 1))
            if mover_under:
                self._emit(target, mover, _det_sign(d_t, d_m), sub)
            else:
                self._emit(mover, target, _det_sign(d_m, d_t), sub)

        def pass_between(mover, going_left, order, sub):
            legs = between if going_left else list(reversed(between))
            d_m = self._dir(mover, (-1, 0) if going_left else (1, 0))
            for b in legs:
                d_b = self._dir(b, (0, 1))
                if bystander_over:
                    self._emit(mover, b, _det_sign(d_m, d_b), sub)
                else:
                    self._emit(b, mover, _det_sign(d_b, d_m), sub)

        # outward transit, leftward past everything including the target
        for m in base:
            pass_between(m, True, base, 0)
            transit_target(m, True, 0)
        # wrap from the far side: rightward pass, then leftward pass
        order2 = list(reversed(base))
        for m in order2:
            cross_target(m, False, chirality > 0, 1)
        if turn_twist:
            cid = self._next_id
            self._next_id += 1
            self.crossings.append((cid, turn_twist))
            self.events[order2[0]].append((self._stamp(1), Passage(cid, Role.OVER)))
            self.events[order2[1]].append((self._stamp(1), Passage(cid, Role.UNDER)))
            order3 = list(order2)
        else:
            order3 = list(reversed(order2))
        for m in order3:
            cross_target(m, True, chirality < 0, 2)
        # homeward transit
        order4 = list(reversed(order3))
        for m in order4:
            transit_target(m, False, 3)
            pass_between(m, False, order4, 3)

    def borromean(self, base_position: int = 1, sign: int = 1):
        """Insert the six-crossing Brunnian braid pattern on the strands at
        positions base..base+2 (a pure braid; positions are restored).
        ``sign`` = -1 gives the mirror pattern."""
        for _ in range(3):
            self.braid(base_position, sign > 0)
            self.braid(base_position + 1, sign < 0)

    def unit_braid(self, left_unit: list[int], right_unit: list[int], left_over: bool):
        """Swap two adjacent blocks of strands, the chosen block passing in
        front as a whole.  Every strand of one block crosses every strand
        of the other exactly once; block-internal order is preserved."""
        lpos = sorted(self.pos_of[s] for s in left_unit)
        rpos = sorted(self.pos_of[s] for s in right_unit)
        if lpos[-1] + 1 != rpos[0]:
            raise DiagramError("unit_braid expects adjacent blocks, left then right")
        self._new_slice()
        lefts = sorted(left_unit, key=lambda s: self.pos_of[s])
        rights = sorted(right_unit, key=lambda s: self.pos_of[s])
        # the innermost strands of each block meet first
        for li, l in enumerate(reversed(lefts)):
            d_l = self._dir(l, (1, 1))
            for r in rights:
                d_r = self._dir(r, (-1, 1))
                if left_over:
                    self._emit(l, r, _det_sign(d_l, d_r), li)
                else:
                    self._emit(r, l, _det_sign(d_r, d_l), li)
        base = lpos[0]
        new_order = rights + lefts
        for offset, s in enumerate(new_order):
            self.pos_of[s] = base + offset
            self.at[base + offset] = s

    # token pattern of the two-strand tangle whose closure is the Whitehead
    # link: x carries the fused pair of Brunnian strands (with the drag
    # crossing 7 restoring the bottom-to-top boundary), z the third strand.
    _WH_X = [(7, "O"), (1, "O"), (2, "U"), (4, "O"), (5, "U"),
             (6, "O"), (4, "U"), (3, "O"), (1, "U"), (7, "U")]
    _WH_Z = [(2, "O"), (3, "U"), (5, "O"), (6, "U")]
    _WH_SIGNS = {1: -1, 2: -1, 3: -1, 4: 1, 5: 1, 6: 1, 7: 1}
    _WH_CROSS = {2, 3, 5, 6}  # crossings joining the two pattern strands

    def whitehead_block(self, x_leg: int, z_leg: int, mirror: bool = False):
        """Splice the Whitehead clasp pattern between two adjacent strands
        (x just left of z).  The pattern has linking number zero and its
        two strands are individually unknotted; ``mirror`` flips it.

        Down-oriented strands traverse their tokens in reverse, which the
        stamp ordering provides automatically; reversing one strand flips
        the signs of the crossings joining the two strands.
        """
        if self.pos_of[x_leg] + 1 != self.pos_of[z_leg]:
            raise DiagramError("whitehead_block expects adjacent strands, x left of z")
        self._new_slice()
        rename = {c: self._next_id + k for k, c in enumerate(sorted(self._WH_SIGNS))}
        self._next_id += len(rename)
        flip_all = -1 if mirror else 1
        for c, s in self._WH_SIGNS.items():
            sign = s * flip_all
            if c in self._WH_CROSS:
                if not self.up[x_leg - 1]:
                    sign = -sign
                if not self.up[z_leg - 1]:
                    sign = -sign
            self.crossings.append((rename[c], sign))
        swap = {"O": "U", "U": "O"}
        for c, role in self._WH_X:
            r = swap[role] if mirror else role
            self.events[x_leg].append((self._stamp(0), Passage(rename[c], Role(r))))
        for c, role in self._WH_Z:
            r = swap[role] if mirror else role
            self.events[z_leg].append((self._stamp(1), Passage(rename[c], Role(r))))

    def unit_borromean(self, u1: list[int], u2: list[int], u3: list[int], sign: int = 1):
        """Brunnian braid pattern at the block level: the three units end
        where they started, pairwise unlinked but triply entangled."""
        for _ in range(3):
            self.unit_braid(u1, u2, sign > 0)
            u1, u2 = u2, u1
            self.unit_braid(u2, u3, sign < 0)
            u2, u3 = u3, u2

    # -- assembly --------------------------------------------------------

    def _trunk(self, strand: int) -> list[Passage]:
        ordered = sorted(self.events[strand], key=lambda e: e[0])
        if not self.up[strand - 1]:
            ordered.reverse()
        return [p for _, p in ordered]

    def _return(self, strand: int) -> list[Passage]:
        ordered = sorted(self.return_events[strand], key=lambda e: e[0], reverse=True)
        return [p for _, p in ordered]

    def _check_pure(self):
        if any(self.pos_of[s] != s for s in self.pos_of):
            raise DiagramError("wiring is not pure: strands end at permuted positions")

    def tangle(self) -> Diagram:
        if not all(self.up):
            raise DiagramError("tangle strands must all be upward")
        if not self.returns_enabled:
            raise DiagramError("tangle assembly needs return tracking enabled")
        self._check_pure()
        passages = [self._trunk(s) + self._return(s) for s in range(1, self.k + 1)]
        return Diagram(DiagramKind.TANGLE, self.k, self.crossings, passages)

    def template(self) -> StrandTemplate:
        if self.k % 2 != 0:
            raise DiagramError("templates need an even strand count")
        expected = [s % 2 == 1 for s in range(1, self.k + 1)]
        if self.up != expected:
            raise DiagramError("template strands must alternate up, down")
        if any(self.return_events[c] for c in self.return_events):
            raise DiagramError("templates must be built with returns disabled")
        self._check_pure()
        return StrandTemplate(
            [self._trunk(s) for s in range(1, self.k + 1)], self.crossings
        )


def template_wiring(pair_count: int) -> Wiring:
    """Fresh 2n-strand wiring with the template orientation pattern."""
    return Wiring(
        2 * pair_count,
        [s % 2 == 1 for s in range(1, 2 * pair_count + 1)],
        returns=False,
    )
