"""Master-problem construction for utility-owned microgrid scheduling.

Builds the unit-commitment MILP for one scheduling block (any number of
hours, normally whole days), manages the optimality-cut rows that tie the
transformer-aging term to the exchange magnitudes, and decodes/validates
solver output.

Sign conventions. Grid exchange P^M is net export: positive when the
microgrid sells to the utility, negative when it imports. The hourly load
balance reads

    sum_i P_it + sum_s (dch_st - ch_st) - sum_l D_lt - P^M_t
        = fixed_t - renewable_t

and the objective charges generation and prices the exchange:

    minimize  sum_it F_i * P_it  -  sum_t rho_t * P^M_t  +  Lambda

so imports cost money and exports earn it. The aging cuts act on the
exchange magnitude, linearized by the split P^M = P^M1 - P^M2 with
P^M1, P^M2 >= 0 gated by selector binaries x, y (x + y <= 1); in any
canonical solution P^M1 + P^M2 = |P^M|.

Minimum up/down logic uses window inequalities

    sum_{tau=t}^{min(t+UT,H)-1} I_tau >= L * (I_t - I_{t-1})

rather than the running counters the source constraints are phrased with;
at block edges the history is carried as (state, streak) pairs and realized
by fixing the leading hours. Adjustable-load cycles must complete inside
their daily window, so their windows are not clipped: a start too close to
the window end is infeasible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .milp import MilpModel
from .thermal import TransformerThermalParams

# Absolute feasibility tolerance on replayed schedule rows.
FEAS_TOL = 1e-6

# Lambda is structurally nonnegative (aging cost); the upper bound only
# keeps the model box-bounded.
_LAMBDA_MAX = 1e12

_LONG_AGO = 10 ** 6  # carry streak meaning "no pending minimum-time debt"


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class DispatchableUnit:
    """Fuel-fired unit with linear cost and commitment logic."""

    name: str
    cost_per_mwh: float
    p_min: float
    p_max: float
    ramp_up: float
    ramp_down: float
    min_up: int
    min_down: int
    initial_commitment: bool = False
    initial_output: float = 0.0

    def __post_init__(self):
        _require(0.0 <= self.p_min <= self.p_max,
                 f"unit {self.name}: need 0 <= p_min <= p_max")
        _require(self.ramp_up > 0.0 and self.ramp_down > 0.0,
                 f"unit {self.name}: ramps must be positive")
        _require(self.min_up >= 1 and self.min_down >= 1,
                 f"unit {self.name}: minimum times must be >= 1 hour")
        _require(math.isfinite(self.cost_per_mwh),
                 f"unit {self.name}: cost coefficient must be finite")


@dataclass(frozen=True)
class RenewableUnit:
    """Non-dispatchable unit; its hourly output is exogenous input."""

    name: str
    p_max: float

    def __post_init__(self):
        _require(self.p_max >= 0.0, f"unit {self.name}: p_max must be >= 0")


@dataclass(frozen=True)
class StorageUnit:
    """Battery with mode binaries and linearized energy accounting."""

    name: str
    energy_min: float
    energy_max: float
    charge_min: float
    charge_max: float
    discharge_min: float
    discharge_max: float
    min_charge_time: int
    min_discharge_time: int
    efficiency: float = 0.9
    period: float = 1.0
    initial_energy: float = 0.0

    def __post_init__(self):
        _require(0.0 <= self.energy_min <= self.initial_energy <= self.energy_max,
                 f"storage {self.name}: need energy_min <= initial_energy <= energy_max")
        _require(0.0 < self.efficiency <= 1.0,
                 f"storage {self.name}: efficiency must lie in (0, 1]")
        _require(0.0 <= self.charge_min <= self.charge_max,
                 f"storage {self.name}: charge rate bounds out of order")
        _require(0.0 <= self.discharge_min <= self.discharge_max,
                 f"storage {self.name}: discharge rate bounds out of order")
        _require(self.min_charge_time >= 1 and self.min_discharge_time >= 1,
                 f"storage {self.name}: minimum mode times must be >= 1 hour")
        _require(self.period > 0.0, f"storage {self.name}: period must be positive")


@dataclass(frozen=True)
class AdjustableLoad:
    """Controllable demand that must absorb a fixed energy inside a daily window.

    window_start/window_end are 1-based inclusive hours of day (1..24).
    """

    name: str
    d_min: float
    d_max: float
    required_energy: float
    window_start: int
    window_end: int
    min_on_time: int = 1
    kind: str = "shiftable"

    def __post_init__(self):
        _require(0.0 <= self.d_min <= self.d_max,
                 f"load {self.name}: need 0 <= d_min <= d_max")
        _require(1 <= self.window_start <= self.window_end <= 24,
                 f"load {self.name}: window must satisfy 1 <= start <= end <= 24")
        horizon = self.window_end - self.window_start + 1
        _require(self.required_energy <= self.d_max * horizon + FEAS_TOL,
                 f"load {self.name}: required energy exceeds window capacity")
        _require(self.required_energy >= 0.0,
                 f"load {self.name}: required energy must be >= 0")
        _require(self.min_on_time >= 1,
                 f"load {self.name}: min_on_time must be >= 1")
        _require(self.kind in ("shiftable", "curtailable"),
                 f"load {self.name}: kind must be shiftable or curtailable")


@dataclass(frozen=True)
class AssetFleet:
    """Everything the utility schedules, including the interface transformer."""

    dispatchable: tuple = ()
    renewable: tuple = ()
    storage: tuple = ()
    adjustable: tuple = ()
    transformer: TransformerThermalParams = field(default_factory=TransformerThermalParams)

    def __post_init__(self):
        names = [a.name for group in (self.dispatchable, self.renewable,
                                      self.storage, self.adjustable) for a in group]
        _require(len(names) == len(set(names)), "asset names must be unique")


@dataclass(frozen=True)
class HourlyInput:
    """Exogenous data for one hour."""

    fixed_load: float
    renewable_generation: tuple = ()
    price: float = 0.0
    ambient: float = 20.0
    grid_connected: int = 1
    line_capacity: float = 15.0
    loading_cap_fraction: float = math.inf

    def __post_init__(self):
        _require(self.line_capacity > 0.0, "line_capacity must be positive")
        _require(self.loading_cap_fraction > 0.0,
                 "loading_cap_fraction must be positive")
        _require(self.fixed_load >= 0.0, "fixed_load must be >= 0")
        _require(self.grid_connected in (0, 1), "grid_connected must be 0 or 1")


@dataclass(frozen=True)
class OptimalityCut:
    """Lambda >= constant + sum_t coeff_per_hour[t] * (P^M1_t + P^M2_t)."""

    constant: float
    coeff_per_hour: tuple

    def __post_init__(self):
        _require(math.isfinite(self.constant), "cut constant must be finite")
        _require(all(math.isfinite(c) for c in self.coeff_per_hour),
                 "cut coefficients must be finite")


@dataclass(frozen=True)
class BlockCarry:
    """Boundary state linking consecutive scheduling blocks.

    Streaks count how long the current state has persisted; exchange is the
    previous hour's P^M, or None at a cold (thermally steady) start.
    Storage mode: 0 idle, 1 discharging, 2 charging.
    """

    commitment_state: tuple = ()
    commitment_streak: tuple = ()
    last_output: tuple = ()
    storage_mode: tuple = ()
    storage_streak: tuple = ()
    storage_energy: tuple = ()
    exchange: float | None = None


def initial_carry(fleet: AssetFleet) -> BlockCarry:
    """Carry state implied by the fleet's declared initial conditions."""
    return BlockCarry(
        commitment_state=tuple(int(u.initial_commitment) for u in fleet.dispatchable),
        commitment_streak=tuple(_LONG_AGO for _ in fleet.dispatchable),
        last_output=tuple(u.initial_output for u in fleet.dispatchable),
        storage_mode=tuple(0 for _ in fleet.storage),
        storage_streak=tuple(_LONG_AGO for _ in fleet.storage),
        storage_energy=tuple(s.initial_energy for s in fleet.storage),
        exchange=None,
    )


@dataclass
class ScheduleMap:
    """Variable-index bookkeeping for one built model (-1 where absent)."""

    hours: tuple
    carry: BlockCarry
    n_hours: int
    cap: np.ndarray
    power: np.ndarray
    commit: np.ndarray
    discharge: np.ndarray
    charge: np.ndarray
    discharge_state: np.ndarray
    charge_state: np.ndarray
    energy: np.ndarray
    demand: np.ndarray
    demand_state: np.ndarray
    exchange: np.ndarray
    export_part: np.ndarray
    import_part: np.ndarray
    export_sel: np.ndarray
    import_sel: np.ndarray
    aging_bound: int


@dataclass(frozen=True)
class ScheduleSolution:
    """Decoded block schedule with canonical exchange split and loadings."""

    n_hours: int
    unit_output: np.ndarray
    commitment: np.ndarray
    discharge: np.ndarray
    charge: np.ndarray
    discharge_state: np.ndarray
    charge_state: np.ndarray
    energy: np.ndarray
    demand: np.ndarray
    demand_state: np.ndarray
    exchange: np.ndarray
    export_part: np.ndarray
    import_part: np.ndarray
    export_sel: np.ndarray
    import_sel: np.ndarray
    loading_initial: np.ndarray
    loading_ultimate: np.ndarray
    operation_cost: float
    cut_bound: float
    objective: float


def _day_windows(load: AdjustableLoad, n_hours: int):
    """Absolute [start, end] hour spans of the load's window in each day."""
    spans = []
    day = 0
    while day * 24 < n_hours:
        a = day * 24 + load.window_start - 1
        b = day * 24 + load.window_end - 1
        if a >= n_hours:
            break
        spans.append((a, min(b, n_hours - 1)))
        day += 1
    return spans


def _check_supply_envelope(fleet: AssetFleet, hours, cap: np.ndarray) -> None:
    """Reject hours where the balance row cannot possibly hold."""
    gen_max = sum(u.p_max for u in fleet.dispatchable)
    dch_max = sum(s.discharge_max for s in fleet.storage)
    ch_max = sum(s.charge_max for s in fleet.storage)
    for t, h in enumerate(hours):
        renew = sum(h.renewable_generation)
        supply = gen_max + dch_max + renew + cap[t]
        if h.fixed_load > supply + FEAS_TOL:
            raise ValueError(
                f"hour {t}: fixed load {h.fixed_load:.3f} MW exceeds the maximum "
                f"deliverable supply {supply:.3f} MW")
        disposal = h.fixed_load + ch_max + cap[t]
        if renew > disposal + FEAS_TOL:
            raise ValueError(
                f"hour {t}: renewable output {renew:.3f} MW exceeds the maximum "
                f"absorbable demand {disposal:.3f} MW")


def _min_time_windows(model, name, var_idx, min_time, prev_state, prev_streak,
                      n_hours, clip_end, down=False):
    """Window inequalities plus carry fixing for one on/off variable chain.

    var_idx maps hour -> variable index over [0, n_hours). For down=True the
    roles invert (minimum off time). clip_end=True relaxes the trailing
    windows at the block edge (the next block's carry fixing completes
    them); clip_end=False keeps full-length windows so a start that cannot
    finish is infeasible.
    """
    # Carry debt: a freshly switched state must persist into this block.
    if min_time > 1 and prev_streak < min_time:
        pending = min_time - prev_streak
        want = None
        if not down and prev_state == 1:
            want = 1.0
        elif down and prev_state == 0:
            want = 0.0
        if want is not None:
            for t in range(min(pending, n_hours)):
                j = var_idx[t]
                if j >= 0:
                    model.lb[j] = want
                    model.ub[j] = want

    if min_time <= 1:
        return
    for t in range(n_hours):
        if var_idx[t] < 0:
            continue
        span = []
        for tau in range(t, min(t + min_time, n_hours)):
            if var_idx[tau] < 0:
                break
            span.append(var_idx[tau])
        length = min_time if not clip_end else len(span)
        if length <= 1 and clip_end:
            continue
        coeffs = {}
        rhs = 0.0
        sign = 1.0 if not down else -1.0
        for j in span:
            coeffs[j] = coeffs.get(j, 0.0) + sign
        if down:
            rhs -= length
        # - length * (state_t - state_{t-1}) moved left.
        coeffs[var_idx[t]] = coeffs.get(var_idx[t], 0.0) - sign * length
        if t == 0 or var_idx[t - 1] < 0:
            prev = prev_state if t == 0 else 0
            rhs -= sign * length * prev
        else:
            coeffs[var_idx[t - 1]] = coeffs.get(var_idx[t - 1], 0.0) + sign * length
        coeffs = {j: v for j, v in coeffs.items() if v != 0.0}
        if not coeffs:
            continue
        model.add_row(f"{name}_t{t}", coeffs, ">=", rhs)


def build_model(fleet: AssetFleet, hours, carry: BlockCarry | None = None,
                cuts=()):
    """Assemble the block MILP; returns (model, ScheduleMap).

    hours: sequence of HourlyInput. carry: boundary state (None = fleet
    initial conditions). cuts: iterable of OptimalityCut spanning the block.
    """
    hours = tuple(hours)
    n_hours = len(hours)
    _require(n_hours >= 1, "horizon must contain at least one hour")
    if carry is None:
        carry = initial_carry(fleet)
    n_disp = len(fleet.dispatchable)
    n_ren = len(fleet.renewable)
    n_store = len(fleet.storage)
    n_adj = len(fleet.adjustable)
    _require(len(carry.commitment_state) == n_disp
             and len(carry.storage_energy) == n_store,
             "carry state does not match the fleet")
    for t, h in enumerate(hours):
        _require(len(h.renewable_generation) == n_ren,
                 f"hour {t}: expected {n_ren} renewable outputs")

    p_nom = fleet.transformer.rated_power
    cap = np.empty(n_hours)
    for t, h in enumerate(hours):
        cap[t] = min(h.line_capacity, h.loading_cap_fraction * p_nom) * h.grid_connected
    _check_supply_envelope(fleet, hours, cap)

    model = MilpModel()
    sentinel = -1
    power = np.full((n_disp, n_hours), sentinel, dtype=np.int64)
    commit = np.full((n_disp, n_hours), sentinel, dtype=np.int64)
    discharge = np.full((n_store, n_hours), sentinel, dtype=np.int64)
    charge = np.full((n_store, n_hours), sentinel, dtype=np.int64)
    u_state = np.full((n_store, n_hours), sentinel, dtype=np.int64)
    v_state = np.full((n_store, n_hours), sentinel, dtype=np.int64)
    energy = np.full((n_store, n_hours), sentinel, dtype=np.int64)
    demand = np.full((n_adj, n_hours), sentinel, dtype=np.int64)
    z_state = np.full((n_adj, n_hours), sentinel, dtype=np.int64)
    pm = np.full(n_hours, sentinel, dtype=np.int64)
    pm1 = np.full(n_hours, sentinel, dtype=np.int64)
    pm2 = np.full(n_hours, sentinel, dtype=np.int64)
    x_sel = np.full(n_hours, sentinel, dtype=np.int64)
    y_sel = np.full(n_hours, sentinel, dtype=np.int64)

    for t in range(n_hours):
        for i, unit in enumerate(fleet.dispatchable):
            power[i, t] = model.add_variable(f"p_{unit.name}_t{t}", 0.0,
                                             unit.p_max, unit.cost_per_mwh)
            commit[i, t] = model.add_variable(f"on_{unit.name}_t{t}", 0.0, 1.0,
                                              0.0, binary=True)
        for s, st in enumerate(fleet.storage):
            discharge[s, t] = model.add_variable(f"dch_{st.name}_t{t}", 0.0,
                                                 st.discharge_max, 0.0)
            charge[s, t] = model.add_variable(f"ch_{st.name}_t{t}", 0.0,
                                              st.charge_max, 0.0)
            u_state[s, t] = model.add_variable(f"dchon_{st.name}_t{t}", 0.0, 1.0,
                                               0.0, binary=True)
            v_state[s, t] = model.add_variable(f"chon_{st.name}_t{t}", 0.0, 1.0,
                                               0.0, binary=True)
            energy[s, t] = model.add_variable(f"soc_{st.name}_t{t}",
                                              st.energy_min, st.energy_max, 0.0)
        pm[t] = model.add_variable(f"xch_t{t}", -cap[t], cap[t], -hours[t].price)
        pm1[t] = model.add_variable(f"xch_out_t{t}", 0.0, cap[t], 0.0)
        pm2[t] = model.add_variable(f"xch_in_t{t}", 0.0, cap[t], 0.0)
        x_sel[t] = model.add_variable(f"sell_t{t}", 0.0, 1.0, 0.0, binary=True)
        y_sel[t] = model.add_variable(f"buy_t{t}", 0.0, 1.0, 0.0, binary=True)

    for li, load in enumerate(fleet.adjustable):
        for (a, b) in _day_windows(load, n_hours):
            span = b - a + 1
            day = a // 24
            if load.required_energy > load.d_max * span + FEAS_TOL:
                raise ValueError(
                    f"load {load.name}: required energy {load.required_energy} MWh "
                    f"does not fit the day-{day} window truncated to {span} h")
            # All-hours-on is forced whenever E cannot fit in span-1 hours.
            forced = load.required_energy > load.d_max * (span - 1) + FEAS_TOL
            for t in range(a, b + 1):
                demand[li, t] = model.add_variable(
                    f"adj_{load.name}_t{t}", 0.0, load.d_max, 0.0)
                z_state[li, t] = model.add_variable(
                    f"adjon_{load.name}_t{t}", 1.0 if forced else 0.0, 1.0,
                    0.0, binary=True)

    aging_bound = model.add_variable("aging_bound", 0.0, _LAMBDA_MAX, 1.0)

    # Hourly rows.
    for t in range(n_hours):
        h = hours[t]
        balance = {}
        for i in range(n_disp):
            balance[int(power[i, t])] = 1.0
        for s in range(n_store):
            balance[int(discharge[s, t])] = 1.0
            balance[int(charge[s, t])] = -1.0
        for li in range(n_adj):
            if demand[li, t] >= 0:
                balance[int(demand[li, t])] = -1.0
        balance[int(pm[t])] = -1.0
        rhs = hours[t].fixed_load - sum(h.renewable_generation)
        model.add_row(f"balance_t{t}", balance, "=", rhs)

        for i, unit in enumerate(fleet.dispatchable):
            model.add_row(f"capmax_{unit.name}_t{t}",
                          {int(power[i, t]): 1.0, int(commit[i, t]): -unit.p_max},
                          "<=", 0.0)
            model.add_row(f"capmin_{unit.name}_t{t}",
                          {int(power[i, t]): 1.0, int(commit[i, t]): -unit.p_min},
                          ">=", 0.0)
            if t == 0:
                prev = carry.last_output[i]
                model.add_row(f"rampup_{unit.name}_t{t}",
                              {int(power[i, t]): 1.0}, "<=", unit.ramp_up + prev)
                model.add_row(f"rampdn_{unit.name}_t{t}",
                              {int(power[i, t]): -1.0}, "<=",
                              unit.ramp_down - prev)
            else:
                model.add_row(f"rampup_{unit.name}_t{t}",
                              {int(power[i, t]): 1.0, int(power[i, t - 1]): -1.0},
                              "<=", unit.ramp_up)
                model.add_row(f"rampdn_{unit.name}_t{t}",
                              {int(power[i, t - 1]): 1.0, int(power[i, t]): -1.0},
                              "<=", unit.ramp_down)

        for s, st in enumerate(fleet.storage):
            model.add_row(f"dchmax_{st.name}_t{t}",
                          {int(discharge[s, t]): 1.0,
                           int(u_state[s, t]): -st.discharge_max}, "<=", 0.0)
            model.add_row(f"dchmin_{st.name}_t{t}",
                          {int(discharge[s, t]): 1.0,
                           int(u_state[s, t]): -st.discharge_min}, ">=", 0.0)
            model.add_row(f"chmax_{st.name}_t{t}",
                          {int(charge[s, t]): 1.0,
                           int(v_state[s, t]): -st.charge_max}, "<=", 0.0)
            model.add_row(f"chmin_{st.name}_t{t}",
                          {int(charge[s, t]): 1.0,
                           int(v_state[s, t]): -st.charge_min}, ">=", 0.0)
            model.add_row(f"onemode_{st.name}_t{t}",
                          {int(u_state[s, t]): 1.0, int(v_state[s, t]): 1.0},
                          "<=", 1.0)
            # soc_t - soc_{t-1} + dch*tau/eta - ch*tau = 0
            coeffs = {int(energy[s, t]): 1.0,
                      int(discharge[s, t]): st.period / st.efficiency,
                      int(charge[s, t]): -st.period}
            if t == 0:
                model.add_row(f"soc_{st.name}_t{t}", coeffs, "=",
                              carry.storage_energy[s])
            else:
                coeffs[int(energy[s, t - 1])] = -1.0
                model.add_row(f"soc_{st.name}_t{t}", coeffs, "=", 0.0)

        for li, load in enumerate(fleet.adjustable):
            if demand[li, t] < 0:
                continue
            model.add_row(f"adjmax_{load.name}_t{t}",
                          {int(demand[li, t]): 1.0,
                           int(z_state[li, t]): -load.d_max}, "<=", 0.0)
            model.add_row(f"adjmin_{load.name}_t{t}",
                          {int(demand[li, t]): 1.0,
                           int(z_state[li, t]): -load.d_min}, ">=", 0.0)

        # Exchange split: identity plus selector gating.
        model.add_row(f"xchsplit_t{t}",
                      {int(pm[t]): 1.0, int(pm1[t]): -1.0, int(pm2[t]): 1.0},
                      "=", 0.0)
        model.add_row(f"sellgate_t{t}",
                      {int(pm1[t]): 1.0, int(x_sel[t]): -cap[t]}, "<=", 0.0)
        model.add_row(f"buygate_t{t}",
                      {int(pm2[t]): 1.0, int(y_sel[t]): -cap[t]}, "<=", 0.0)
        model.add_row(f"oneside_t{t}",
                      {int(x_sel[t]): 1.0, int(y_sel[t]): 1.0}, "<=", 1.0)

    # Minimum-time windows.
    for i, unit in enumerate(fleet.dispatchable):
        prev_on = carry.commitment_state[i]
        streak = carry.commitment_streak[i]
        _min_time_windows(model, f"minup_{unit.name}", commit[i], unit.min_up,
                          prev_on, streak if prev_on == 1 else _LONG_AGO,
                          n_hours, clip_end=True, down=False)
        _min_time_windows(model, f"mindn_{unit.name}", commit[i], unit.min_down,
                          prev_on, streak if prev_on == 0 else _LONG_AGO,
                          n_hours, clip_end=True, down=True)
    for s, st in enumerate(fleet.storage):
        u_prev = 1 if carry.storage_mode[s] == 1 else 0
        v_prev = 1 if carry.storage_mode[s] == 2 else 0
        streak = carry.storage_streak[s]
        _min_time_windows(model, f"mindch_{st.name}", u_state[s],
                          st.min_discharge_time, u_prev,
                          streak if u_prev == 1 else _LONG_AGO,
                          n_hours, clip_end=True, down=False)
        _min_time_windows(model, f"minch_{st.name}", v_state[s],
                          st.min_charge_time, v_prev,
                          streak if v_prev == 1 else _LONG_AGO,
                          n_hours, clip_end=True, down=False)
    for li, load in enumerate(fleet.adjustable):
        # Window-interior chains; z is absent outside windows so each window
        # starts from state 0 and windows are not clipped at their end.
        _min_time_windows(model, f"minon_{load.name}", z_state[li],
                          load.min_on_time, 0, _LONG_AGO,
                          n_hours, clip_end=False, down=False)

    # Energy completion per day window.
    for li, load in enumerate(fleet.adjustable):
        for (a, b) in _day_windows(load, n_hours):
            coeffs = {int(demand[li, t]): 1.0 for t in range(a, b + 1)}
            model.add_row(f"cycle_{load.name}_d{a // 24}", coeffs, "=",
                          load.required_energy)

    # Cut pool.
    for k, cut in enumerate(cuts):
        _require(len(cut.coeff_per_hour) == n_hours,
                 f"cut {k}: expected {n_hours} hourly coefficients")
        coeffs = {int(aging_bound): 1.0}
        for t, cf in enumerate(cut.coeff_per_hour):
            if cf != 0.0:
                coeffs[int(pm1[t])] = -cf
                coeffs[int(pm2[t])] = -cf
        model.add_row(f"cut{k}", coeffs, ">=", cut.constant)

    smap = ScheduleMap(
        hours=hours, carry=carry, n_hours=n_hours, cap=cap,
        power=power, commit=commit,
        discharge=discharge, charge=charge,
        discharge_state=u_state, charge_state=v_state, energy=energy,
        demand=demand, demand_state=z_state,
        exchange=pm, export_part=pm1, import_part=pm2,
        export_sel=x_sel, import_sel=y_sel,
        aging_bound=int(aging_bound),
    )
    model.rounding_hint = _make_rounding_hint(model, smap)
    model.schedule_map = smap
    return model, smap


def _make_rounding_hint(model: MilpModel, smap: ScheduleMap):
    """Selector canonicalization: the split binaries are the only binaries
    whose LP relaxation is routinely fractional at an otherwise integral
    point; rounding them by the exchange sign preserves every row."""
    selector = np.zeros(model.n_variables, dtype=bool)
    selector[smap.export_sel] = True
    selector[smap.import_sel] = True
    hard = [j for j in model.binary_indices() if not selector[j]]

    def hint(values: np.ndarray):
        for j in hard:
            if abs(values[j] - round(values[j])) > 1e-6:
                return None
        out = values.copy()
        for j in hard:
            out[j] = round(out[j])
        for t in range(smap.n_hours):
            ex = out[smap.exchange[t]]
            if ex > 1e-9:
                out[smap.export_part[t]] = ex
                out[smap.import_part[t]] = 0.0
                out[smap.export_sel[t]] = 1.0
                out[smap.import_sel[t]] = 0.0
            elif ex < -1e-9:
                out[smap.export_part[t]] = 0.0
                out[smap.import_part[t]] = -ex
                out[smap.export_sel[t]] = 0.0
                out[smap.import_sel[t]] = 1.0
            else:
                out[smap.export_part[t]] = 0.0
                out[smap.import_part[t]] = 0.0
                out[smap.export_sel[t]] = 0.0
                out[smap.import_sel[t]] = 0.0
        return out

    return hint


def _row_violations(model: MilpModel, values: np.ndarray):
    """Residuals of every model row at the assignment, above tolerance."""
    bad = []
    for row in model.rows:
        lhs = float(np.dot(row.coef, values[row.idx]))
        if row.sense == "<=" and lhs > row.rhs + FEAS_TOL:
            bad.append(f"{row.name}: {lhs:.9g} > {row.rhs:.9g}")
        elif row.sense == ">=" and lhs < row.rhs - FEAS_TOL:
            bad.append(f"{row.name}: {lhs:.9g} < {row.rhs:.9g}")
        elif row.sense == "=" and abs(lhs - row.rhs) > FEAS_TOL:
            bad.append(f"{row.name}: {lhs:.9g} != {row.rhs:.9g}")
    return bad


def decode_solution(model: MilpModel, assignment, fleet: AssetFleet) -> ScheduleSolution:
    """Validate a solver assignment against the model and decode it.

    The exchange split and its selectors are canonicalized by the sign of
    P^M (zero exchange maps to both selectors off); loadings follow
    K^U_t = |P^M_t| / P_nom and K^I_t = |P^M_{t-1}| / P_nom with the carry
    exchange feeding t = 0 (steady start duplicates K^U_0).
    """
    smap: ScheduleMap = model.schedule_map
    values = np.asarray(assignment, dtype=np.float64)
    _require(values.shape == (model.n_variables,),
             "assignment length does not match the model")
    bad = _row_violations(model, values)
    if bad:
        raise ValueError("assignment violates model rows: " + "; ".join(bad[:8]))

    H = smap.n_hours

    def pick(idx):
        out = np.zeros(idx.shape)
        mask = idx >= 0
        out[mask] = values[idx[mask]]
        return out

    unit_output = pick(smap.power)
    commitment = np.rint(pick(smap.commit)).astype(np.int64)
    dch = pick(smap.discharge)
    ch = pick(smap.charge)
    u = np.rint(pick(smap.discharge_state)).astype(np.int64)
    v = np.rint(pick(smap.charge_state)).astype(np.int64)
    soc = pick(smap.energy)
    dem = pick(smap.demand)
    z = np.rint(pick(smap.demand_state)).astype(np.int64)
    z[smap.demand < 0] = 0

    exchange = values[smap.exchange].copy()
    export_part = np.where(exchange > 0.0, exchange, 0.0)
    import_part = np.where(exchange < 0.0, -exchange, 0.0)
    export_sel = (exchange > FEAS_TOL).astype(np.int64)
    import_sel = (exchange < -FEAS_TOL).astype(np.int64)

    p_nom = fleet.transformer.rated_power
    k_ult = np.abs(exchange) / p_nom
    k_init = np.empty(H)
    if smap.carry.exchange is None:
        k_init[0] = k_ult[0]
    else:
        k_init[0] = abs(smap.carry.exchange) / p_nom
    k_init[1:] = k_ult[:-1]

    prices = np.array([h.price for h in smap.hours])
    costs = np.array([un.cost_per_mwh for un in fleet.dispatchable])
    op_cost = float(costs @ unit_output.sum(axis=1) if unit_output.size else 0.0)
    op_cost -= float(prices @ exchange)
    cut_bound = float(values[smap.aging_bound])

    return ScheduleSolution(
        n_hours=H, unit_output=unit_output, commitment=commitment,
        discharge=dch, charge=ch, discharge_state=u, charge_state=v,
        energy=soc, demand=dem, demand_state=z,
        exchange=exchange, export_part=export_part, import_part=import_part,
        export_sel=export_sel, import_sel=import_sel,
        loading_initial=k_init, loading_ultimate=k_ult,
        operation_cost=op_cost, cut_bound=cut_bound,
        objective=op_cost + cut_bound,
    )


def encode_solution(model: MilpModel, fleet: AssetFleet, sol: ScheduleSolution,
                    cuts=()) -> np.ndarray:
    """Express a decoded schedule as a full variable vector for ``model``.

    The model must come from the same fleet with the same hour count; its
    hours and carry may differ from the ones that produced ``sol``. The
    exchange is re-balanced against the model's own loads and renewables,
    the storage energy chain is replayed from the model's carry, and the
    aging bound is lifted onto the given cut pool. The result is only a
    candidate: callers hand it to the solver as an incumbent seed and the
    solver verifies or drops it.
    """
    smap: ScheduleMap = model.schedule_map
    H = smap.n_hours
    _require(sol.n_hours == H, "schedule length does not match the model")
    svec = np.zeros(model.n_variables)

    def put(idx, vals):
        mask = idx >= 0
        svec[idx[mask]] = np.asarray(vals, dtype=np.float64)[mask]

    put(smap.power, sol.unit_output)
    put(smap.commit, sol.commitment)
    put(smap.discharge, sol.discharge)
    put(smap.charge, sol.charge)
    put(smap.discharge_state, sol.discharge_state)
    put(smap.charge_state, sol.charge_state)
    put(smap.demand, sol.demand)
    put(smap.demand_state, sol.demand_state)

    for s, st in enumerate(fleet.storage):
        e = smap.carry.storage_energy[s]
        for t in range(H):
            e = e - sol.discharge[s, t] * st.period / st.efficiency \
                  + sol.charge[s, t] * st.period
            svec[smap.energy[s, t]] = e

    load = np.array([h.fixed_load for h in smap.hours])
    ren = np.array([sum(h.renewable_generation) for h in smap.hours])
    exch = (sol.unit_output.sum(axis=0) + sol.discharge.sum(axis=0)
            - sol.charge.sum(axis=0) - sol.demand.sum(axis=0) - load + ren)
    svec[smap.exchange] = exch
    svec[smap.export_part] = np.where(exch > 0.0, exch, 0.0)
    svec[smap.import_part] = np.where(exch < 0.0, -exch, 0.0)
    svec[smap.export_sel] = (exch > 0.0).astype(np.float64)
    svec[smap.import_sel] = (exch < 0.0).astype(np.float64)

    split = svec[smap.export_part] + svec[smap.import_part]
    lift = 0.0
    for cut in cuts:
        lift = max(lift, cut.constant + float(np.dot(cut.coeff_per_hour, split)))
    svec[smap.aging_bound] = lift
    return svec


def make_cut(q_hat: float, lambda_duals, mu_duals, anchor_split) -> OptimalityCut:
    """Assemble one optimality cut from subproblem duals.

    lambda_duals[t] prices hour t's initial loading (a function of the
    previous hour's exchange), mu_duals[t] its ultimate loading; hour t's
    exchange magnitude therefore collects mu[t] + lambda[t+1], with the
    final lambda falling outside the block. anchor_split is the incumbent
    P^M1 + P^M2 profile the linearization is anchored at.
    """
    lam = np.asarray(lambda_duals, dtype=np.float64)
    mu = np.asarray(mu_duals, dtype=np.float64)
    anchor = np.asarray(anchor_split, dtype=np.float64)
    _require(lam.shape == mu.shape == anchor.shape, "dual/anchor lengths differ")
    coeff = mu.copy()
    coeff[:-1] += lam[1:]
    constant = float(q_hat - coeff @ anchor)
    return OptimalityCut(constant=constant,
                         coeff_per_hour=tuple(float(c) for c in coeff))


def advance_carry(fleet: AssetFleet, carry: BlockCarry,
                  sol: ScheduleSolution) -> BlockCarry:
    """Boundary state after a solved block, for chaining the next one."""
    H = sol.n_hours

    def streak_of(series, prev_state, prev_streak):
        last = int(series[-1])
        run = 0
        for val in series[::-1]:
            if int(val) != last:
                break
            run += 1
        if run == len(series) and prev_state == last:
            run += prev_streak
        return last, min(run, _LONG_AGO)

    c_state, c_streak, outputs = [], [], []
    for i in range(len(fleet.dispatchable)):
        stt, run = streak_of(sol.commitment[i], carry.commitment_state[i],
                             carry.commitment_streak[i])
        c_state.append(stt)
        c_streak.append(run)
        outputs.append(float(sol.unit_output[i, H - 1]))

    s_mode, s_streak, s_energy = [], [], []
    for s in range(len(fleet.storage)):
        mode_series = np.where(sol.discharge_state[s] == 1, 1,
                               np.where(sol.charge_state[s] == 1, 2, 0))
        prev_mode = carry.storage_mode[s]
        stt, run = streak_of(mode_series, prev_mode, carry.storage_streak[s])
        s_mode.append(stt)
        s_streak.append(run)
        s_energy.append(float(sol.energy[s, H - 1]))

    return BlockCarry(
        commitment_state=tuple(c_state), commitment_streak=tuple(c_streak),
        last_output=tuple(outputs),
        storage_mode=tuple(s_mode), storage_streak=tuple(s_streak),
        storage_energy=tuple(s_energy),
        exchange=float(sol.exchange[H - 1]),
    )


def replay_violations(fleet: AssetFleet, hours, carry: BlockCarry,
                      sol: ScheduleSolution) -> list:
    """Independent structural re-check of a decoded schedule.

    Verifies load balance, exchange caps and split consistency, generator
    gating and ramps, minimum up/down streaks (block-end runs may continue
    into the next block), storage gating/energy accounting/mode streaks,
    and adjustable-load windows with per-day energy completion. Returns a
    list of violation strings; empty means clean.
    """
    hours = tuple(hours)
    H = sol.n_hours
    bad = []
    if len(hours) != H:
        return [f"hour count mismatch: {len(hours)} inputs vs {H} decoded"]
    p_nom = fleet.transformer.rated_power

    cap = np.empty(H)
    for t, h in enumerate(hours):
        cap[t] = min(h.line_capacity, h.loading_cap_fraction * p_nom) * h.grid_connected

    for t, h in enumerate(hours):
        supply = float(sol.unit_output[:, t].sum() if sol.unit_output.size else 0.0)
        supply += float(sol.discharge[:, t].sum() - sol.charge[:, t].sum()
                        if sol.discharge.size else 0.0)
        supply += sum(h.renewable_generation)
        used = h.fixed_load + float(sol.demand[:, t].sum() if sol.demand.size else 0.0)
        used += sol.exchange[t]
        if abs(supply - used) > FEAS_TOL:
            bad.append(f"hour {t}: balance residual {supply - used:.3e}")
        if abs(sol.exchange[t]) > cap[t] + FEAS_TOL:
            bad.append(f"hour {t}: exchange {sol.exchange[t]:.6f} beyond cap {cap[t]:.6f}")
        if abs(sol.export_part[t] - sol.import_part[t] - sol.exchange[t]) > FEAS_TOL:
            bad.append(f"hour {t}: split does not reconstruct the exchange")
        if abs(sol.export_part[t] + sol.import_part[t] - abs(sol.exchange[t])) > FEAS_TOL:
            bad.append(f"hour {t}: split magnitude differs from |exchange|")
        if sol.export_sel[t] + sol.import_sel[t] > 1:
            bad.append(f"hour {t}: both exchange selectors active")
        if sol.export_part[t] > cap[t] * sol.export_sel[t] + FEAS_TOL:
            bad.append(f"hour {t}: export part exceeds its gate")
        if sol.import_part[t] > cap[t] * sol.import_sel[t] + FEAS_TOL:
            bad.append(f"hour {t}: import part exceeds its gate")

    def check_runs(label, series, min_on, min_off, prev_state, prev_streak):
        seq = [int(s) for s in series]
        n = len(seq)
        # Pending debt from the carried state.
        if prev_state == 1 and prev_streak < min_on:
            need = min(min_on - prev_streak, n)
            if any(s != 1 for s in seq[:need]):
                bad.append(f"{label}: carried on-state released before {min_on} h")
        if prev_state == 0 and prev_streak < min_off:
            need = min(min_off - prev_streak, n)
            if any(s != 0 for s in seq[:need]):
                bad.append(f"{label}: carried off-state released before {min_off} h")
        t = 0
        while t < n:
            run = 1
            while t + run < n and seq[t + run] == seq[t]:
                run += 1
            starts_inside = (t > 0 and seq[t - 1] != seq[t]) or (t == 0 and prev_state != seq[t])
            ends_inside = t + run < n
            need = min_on if seq[t] == 1 else min_off
            if starts_inside and ends_inside and run < need:
                kind = "on" if seq[t] == 1 else "off"
                bad.append(f"{label}: {kind}-run of {run} h starting at hour {t} "
                           f"is shorter than {need} h")
            t += run
        return seq

    for i, unit in enumerate(fleet.dispatchable):
        check_runs(f"unit {unit.name}", sol.commitment[i], unit.min_up,
                   unit.min_down, carry.commitment_state[i],
                   carry.commitment_streak[i])
        prev_p = carry.last_output[i]
        for t in range(H):
            on = sol.commitment[i, t]
            p = sol.unit_output[i, t]
            if p > unit.p_max * on + FEAS_TOL or p < unit.p_min * on - FEAS_TOL:
                bad.append(f"unit {unit.name} hour {t}: output {p:.6f} outside "
                           f"commitment gate")
            if p - prev_p > unit.ramp_up + FEAS_TOL:
                bad.append(f"unit {unit.name} hour {t}: ramp-up violated")
            if prev_p - p > unit.ramp_down + FEAS_TOL:
                bad.append(f"unit {unit.name} hour {t}: ramp-down violated")
            prev_p = p

    for s, st in enumerate(fleet.storage):
        u = sol.discharge_state[s]
        v = sol.charge_state[s]
        u_prev = 1 if carry.storage_mode[s] == 1 else 0
        v_prev = 1 if carry.storage_mode[s] == 2 else 0
        check_runs(f"storage {st.name} discharge", u, st.min_discharge_time, 1,
                   u_prev, carry.storage_streak[s] if u_prev else _LONG_AGO)
        check_runs(f"storage {st.name} charge", v, st.min_charge_time, 1,
                   v_prev, carry.storage_streak[s] if v_prev else _LONG_AGO)
        level = carry.storage_energy[s]
        for t in range(H):
            if u[t] + v[t] > 1:
                bad.append(f"storage {st.name} hour {t}: both modes active")
            dch = sol.discharge[s, t]
            ch = sol.charge[s, t]
            if dch > st.discharge_max * u[t] + FEAS_TOL or dch < st.discharge_min * u[t] - FEAS_TOL:
                bad.append(f"storage {st.name} hour {t}: discharge outside gate")
            if ch > st.charge_max * v[t] + FEAS_TOL or ch < st.charge_min * v[t] - FEAS_TOL:
                bad.append(f"storage {st.name} hour {t}: charge outside gate")
            level = level - dch * st.period / st.efficiency + ch * st.period
            if abs(level - sol.energy[s, t]) > FEAS_TOL:
                bad.append(f"storage {st.name} hour {t}: energy accounting drift "
                           f"{level - sol.energy[s, t]:.3e}")
                level = sol.energy[s, t]
            if level > st.energy_max + FEAS_TOL or level < st.energy_min - FEAS_TOL:
                bad.append(f"storage {st.name} hour {t}: energy outside bounds")

    for li, load in enumerate(fleet.adjustable):
        windows = _day_windows(load, H)
        in_window = np.zeros(H, dtype=bool)
        for (a, b) in windows:
            in_window[a:b + 1] = True
        for t in range(H):
            d = sol.demand[li, t]
            z = sol.demand_state[li, t]
            if not in_window[t] and (abs(d) > FEAS_TOL or z != 0):
                bad.append(f"load {load.name} hour {t}: active outside its window")
            if in_window[t]:
                if d > load.d_max * z + FEAS_TOL or d < load.d_min * z - FEAS_TOL:
                    bad.append(f"load {load.name} hour {t}: demand outside gate")
        for (a, b) in windows:
            got = float(sol.demand[li, a:b + 1].sum())
            if abs(got - load.required_energy) > FEAS_TOL:
                bad.append(f"load {load.name} day {a // 24}: delivered {got:.6f} MWh "
                           f"!= required {load.required_energy:.6f}")
            seq = [int(s) for s in sol.demand_state[li, a:b + 1]]
            t = 0
            while t < len(seq):
                run = 1
                while t + run < len(seq) and seq[t + run] == seq[t]:
                    run += 1
                if seq[t] == 1 and run < load.min_on_time:
                    bad.append(f"load {load.name} day {a // 24}: on-run of {run} h "
                               f"< {load.min_on_time} h")
                t += run

    k_ult = np.abs(sol.exchange) / p_nom
    if np.max(np.abs(k_ult - sol.loading_ultimate)) > FEAS_TOL:
        bad.append("ultimate loading does not match |exchange|/P_nom")
    k0 = k_ult[0] if carry.exchange is None else abs(carry.exchange) / p_nom
    k_init = np.concatenate([[k0], k_ult[:-1]])
    if np.max(np.abs(k_init - sol.loading_initial)) > FEAS_TOL:
        bad.append("initial loading does not match the shifted exchange")
    return bad
