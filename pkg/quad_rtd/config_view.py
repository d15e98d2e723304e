# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import logging
import os
from collections.abc import Iterable, Mapping
from typing import Optional, Union, final

from .dynamics.basic_types import Gains, QuadParams
from .geometry.basic_types import Box3
from .helpers.basic_types import ConfigError
from .helpers.consts import CFG_ASSIGN, CFG_COMMENT
from .helpers.file_ops import ensure_parent_dir, resolve_relative_path, sha256_text
from .planner.error_models import ErrorModel
from .planner.iteration import PlannerSettings
from .trajectory.basic_types import ParamBounds, SpeedLimits, TrajTiming
from .trajectory.spline import min_sensing_distance
from .world_bench.basic_types import WorldSettings
from .world_bench.trial import TrialSettings

logger = logging.getLogger(__name__)

ConfigValue = Union[bool, int, float, str]


def parse_value(raw: str) -> ConfigValue:
    raw = raw.strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for convert in (int, float):
        try:
            return convert(raw)
        except ValueError:
            pass
    return raw


def format_value(value: ConfigValue) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def parse_config_text(text: str, source: str = "<string>") -> dict[str, ConfigValue]:
    """Read "key = value" lines. Comments and blank lines are skipped."""
    result: dict[str, ConfigValue] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(CFG_COMMENT):
            continue
        if CFG_ASSIGN not in line:
            raise ConfigError(line, f"{source}:{line_no}: expected 'key {CFG_ASSIGN} value'")
        key, raw = (part.strip() for part in line.split(CFG_ASSIGN, maxsplit=1))
        result[key] = parse_value(raw)
    return result


def read_config_file(path: str) -> dict[str, ConfigValue]:
    with open(path, encoding="utf8") as f:
        return parse_config_text(f.read(), source=path)


def default_config_path() -> str:
    return resolve_relative_path("config.txt")


def _read_groups(path: str) -> dict[str, list[str]]:
    """Keys of the default config grouped by the comment line above them."""
    groups: dict[str, list[str]] = {}
    current = "general"
    with open(path, encoding="utf8") as f:
        for line in f:
            line = line.strip()
            if line.startswith(CFG_COMMENT):
                name = line.lstrip(CFG_COMMENT).strip()
                if name and " " not in name:
                    current = name
            elif CFG_ASSIGN in line:
                groups.setdefault(current, []).append(line.split(CFG_ASSIGN, maxsplit=1)[0].strip())
    return groups


class ConfigSubViewBase:
    """Read-only view of the keys of one group."""

    _view_key: str = "general"

    def __init__(self, config: "RtdConfig") -> None:
        self._config = config

    def __getitem__(self, key: str) -> ConfigValue:
        assert key in self.keys(), f"key '{key}' is not part of view '{self._view_key}'"
        return self._config[key]

    def keys(self) -> list[str]:
        return self._config.group(self._view_key)

    def _float(self, key: str) -> float:
        value = self[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}")
        return float(value)

    def _int(self, key: str) -> int:
        value = self[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}")
        return value


@final
class RobotConfigView(ConfigSubViewBase):
    _view_key: str = "robot"

    @property
    def params(self) -> QuadParams:
        return QuadParams(
            mass=self._float("mass"),
            inertia=(self._float("j1"), self._float("j2"), self._float("j3")),
            k_tau=self._float("k_tau"),
            k_mu=self._float("k_mu"),
            arm_length=self._float("arm_length"),
            rotor_min=self._float("rotor_min"),
            rotor_max=self._float("rotor_max"),
            gravity=self._float("gravity"),
        )

    @property
    def body_width(self) -> float:
        return self._float("body_width")

    @property
    def body(self) -> Box3:
        """Box that bounds the robot, centered at its center of mass."""
        return Box3.cube((0.0, 0.0, 0.0), self.body_width)


@final
class GainsConfigView(ConfigSubViewBase):
    _view_key: str = "gains"

    @property
    def gains(self) -> Gains:
        return Gains.scalar(gx=self._float("gx"), gv=self._float("gv"), gr=self._float("gr"), gw=self._float("gw"))


@final
class TrajectoryConfigView(ConfigSubViewBase):
    _view_key: str = "trajectory"

    @property
    def timing(self) -> TrajTiming:
        return TrajTiming(t_plan=self._float("t_plan"), t_pk=self._float("t_pk"), t_fin=self._float("t_fin"))

    @property
    def limits(self) -> SpeedLimits:
        return SpeedLimits(v_max=self._float("v_max"), a_max=self._float("a_max"))

    @property
    def bounds(self) -> ParamBounds:
        return ParamBounds(kv=self._float("kv_bound"), ka=self._float("ka_bound"), kpk=self._float("kpk_bound"))


@final
class CoverConfigView(ConfigSubViewBase):
    _view_key: str = "cover"

    @property
    def dv(self) -> float:
        return self._float("cover_dv")

    @property
    def dt(self) -> float:
        return self._float("cover_dt")

    @property
    def sim_dt(self) -> float:
        return self._float("sim_dt")

    @property
    def slack(self) -> float:
        return self._float("error_slack")

    @property
    def workers(self) -> int:
        return self._int("table_workers")


@final
class FrsConfigView(ConfigSubViewBase):
    _view_key: str = "frs"

    @property
    def dt(self) -> float:
        return self._float("frs_dt")

    @property
    def samples(self) -> int:
        return self._int("frs_samples")


@final
class PlannerConfigView(ConfigSubViewBase):
    _view_key: str = "planner"

    @property
    def error_mode(self) -> str:
        return str(self["error_mode"])

    @property
    def constant_error(self) -> float:
        return self._float("constant_error")

    @property
    def d_sense(self) -> float:
        return self._float("d_sense")

    @property
    def n_samples(self) -> int:
        return self._int("n_samples")

    @property
    def batch_size(self) -> int:
        return self._int("batch_size")

    @property
    def waypoint_distance(self) -> float:
        return self._float("waypoint_distance")

    @property
    def deterministic(self) -> bool:
        return self["deterministic"] is True

    @property
    def debug_dir(self) -> Optional[str]:
        return str(self["debug_dir"]) or None


@final
class BenchmarkConfigView(ConfigSubViewBase):
    _view_key: str = "benchmark"

    @property
    def seed(self) -> int:
        return self._int("seed")

    @property
    def n_obstacles(self) -> int:
        return self._int("n_obstacles")

    @property
    def world_size(self) -> tuple[float, float, float]:
        return self._float("world_length"), self._float("world_width"), self._float("world_height")

    @property
    def obstacle_sides(self) -> tuple[float, float]:
        return self._float("obstacle_min"), self._float("obstacle_max")

    @property
    def clearance(self) -> float:
        return self._float("clearance")

    @property
    def goal_radius(self) -> float:
        return self._float("goal_radius")

    @property
    def max_sim_time(self) -> float:
        return self._float("max_sim_time")

    @property
    def fail_safe_limit(self) -> int:
        return self._int("fail_safe_limit")


# Keys that must hold strictly positive numbers.
POSITIVE_KEYS = (
    "mass j1 j2 j3 k_tau k_mu arm_length rotor_min rotor_max gravity body_width gx gv gr gw "
    "t_plan t_pk t_fin v_max a_max kv_bound ka_bound kpk_bound cover_dv cover_dt sim_dt table_workers "
    "frs_dt frs_samples constant_error d_sense n_samples batch_size waypoint_distance world_length world_width "
    "world_height obstacle_min obstacle_max goal_radius max_sim_time fail_safe_limit"
).split()
ERROR_MODES = tuple(ErrorModel.modes())
# Keys that change how artifacts are built, not what they contain.
NOT_HASHED = frozenset(("table_workers",))


class RtdConfig:
    """
    Settings of the whole pipeline.
    Defaults come from config.txt shipped with the package, a user file overrides them.
    """

    def __init__(self, overrides: Optional[Mapping[str, ConfigValue]] = None) -> None:
        path = default_config_path()
        self._default_config = read_config_file(path)
        self._groups = _read_groups(path)
        self._config = dict(self._default_config)
        for key, value in (overrides or {}).items():
            if key not in self._default_config:
                raise ConfigError(key, "unknown key")
            self._config[key] = value
        self.robot = RobotConfigView(self)
        self.gains = GainsConfigView(self)
        self.trajectory = TrajectoryConfigView(self)
        self.cover = CoverConfigView(self)
        self.frs = FrsConfigView(self)
        self.planner = PlannerConfigView(self)
        self.benchmark = BenchmarkConfigView(self)
        self.validate()

    def __getitem__(self, key: str) -> ConfigValue:
        return self._config[key]

    def keys(self) -> Iterable[str]:
        return self._config.keys()

    def group(self, name: str) -> list[str]:
        return self._groups[name]

    def replace(self, **changes: ConfigValue) -> "RtdConfig":
        return RtdConfig({**self._config, **changes})

    def validate(self) -> None:
        for key in POSITIVE_KEYS:
            value = self._config[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(key, f"expected a number, got {value!r}")
            if value <= 0:
                raise ConfigError(key, f"must be positive, got {value}")
        timing = self.trajectory.timing
        if not timing.t_plan <= timing.t_pk < timing.t_fin:
            raise ConfigError("t_pk", f"must satisfy t_plan <= t_pk < t_fin, got {tuple(timing)}")
        if self["rotor_min"] >= self["rotor_max"]:
            raise ConfigError("rotor_min", "must be below rotor_max")
        if self["obstacle_min"] > self["obstacle_max"]:
            raise ConfigError("obstacle_min", "must not exceed obstacle_max")
        if self.planner.error_mode not in ERROR_MODES:
            raise ConfigError("error_mode", f"must be one of {ERROR_MODES}")
        required = min_sensing_distance(timing, self.trajectory.limits.v_max)
        if self.planner.d_sense < required:
            raise ConfigError("d_sense", f"must be at least {required:.2f} m to cover the longest plan")

    def dump(self) -> str:
        lines = []
        for name, keys in self._groups.items():
            lines.append(f"{CFG_COMMENT} {name}")
            lines.extend(f"{key} {CFG_ASSIGN} {format_value(self._config[key])}" for key in keys)
            lines.append("")
        return "\n".join(lines)

    def write(self, path: str) -> None:
        with open(ensure_parent_dir(path), "w", encoding="utf8") as f:
            f.write(self.dump())

    def config_hash(self, *views: ConfigSubViewBase) -> str:
        """Hash of the keys of the given views, or of every key."""
        keys = [key for view in views for key in view.keys()] if views else list(self._config)
        keys = [key for key in keys if key not in NOT_HASHED]
        return sha256_text("\n".join(f"{key}={format_value(self._config[key])}" for key in keys))

    @property
    def frs_hash(self) -> str:
        return self.config_hash(self.trajectory, self.frs)

    @property
    def table_hash(self) -> str:
        return self.config_hash(self.robot, self.gains, self.trajectory, self.cover)

    def planner_settings(self) -> PlannerSettings:
        return PlannerSettings(
            params=self.robot.params,
            gains=self.gains.gains,
            body=self.robot.body,
            timing=self.trajectory.timing,
            limits=self.trajectory.limits,
            d_sense=self.planner.d_sense,
            waypoint_distance=self.planner.waypoint_distance,
            n_samples=self.planner.n_samples,
            batch_size=self.planner.batch_size,
            deterministic=self.planner.deterministic,
            sim_dt=self.cover.sim_dt,
            debug_dir=self.planner.debug_dir,
        )

    def trial_settings(self) -> TrialSettings:
        return TrialSettings(
            planner=self.planner_settings(),
            goal_radius=self.benchmark.goal_radius,
            max_sim_time=self.benchmark.max_sim_time,
            fail_safe_limit=self.benchmark.fail_safe_limit,
        )

    def world_settings(self) -> WorldSettings:
        return WorldSettings(
            n_obstacles=self.benchmark.n_obstacles,
            size=self.benchmark.world_size,
            obstacle_sides=self.benchmark.obstacle_sides,
            clearance=self.benchmark.clearance,
            body_width=self.robot.body_width,
        )


def load_config(path: Optional[str] = None) -> RtdConfig:
    if path is None:
        return RtdConfig()
    if not os.path.isfile(path):
        raise ConfigError(path, "config file not found")
    config = RtdConfig(read_config_file(path))
    logger.debug(f"Loaded config from {path}.")
    return config
