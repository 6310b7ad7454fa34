"""Click CLI for the RIS beamforming and association simulator."""
from __future__ import annotations

import logging
import time
from pathlib import Path
from typing import Optional

import click

from risdrl.config import config_hash, derive_db_path
from risdrl.errors import RisDrlError
from risdrl.profiles import BUILTIN_PROFILES, ResolvedConfig, get_profile, resolve_config, resolve_seed


class Context:
    """Holds the resolved configuration from --profile / --config."""

    def __init__(self, profile: str | None = None, config_path: Path | None = None):
        self._profile_name = profile
        self._config_path = config_path
        self._resolved: ResolvedConfig | None = None

    @property
    def config(self) -> ResolvedConfig:
        if self._resolved is None:
            self._resolved = resolve_config(self._profile_name, self._config_path)
        return self._resolved

    @property
    def requested_profile(self) -> str | None:
        return self._profile_name

    @property
    def config_path(self) -> Path | None:
        return self._config_path

    @property
    def profile_name(self) -> str:
        return self.config.profile

    @property
    def db(self) -> Path:
        return derive_db_path(self.profile_name)

    def seed(self, cli_seed: Optional[int]) -> int:
        return resolve_seed(cli_seed, self.config.seed)


pass_ctx = click.make_pass_decorator(Context)


def _describe(theta: float, phi: float, ris_bs, ue_bs) -> str:
    owner = "none" if ris_bs is None else f"BS{ris_bs}"
    servers = " ".join(f"BS{j}" for j in ue_bs)
    return f"theta={theta:.4f} phi={phi:.4f} RIS->{owner} UEs->[{servers}]"


@click.group()
@click.option(
    "--profile", "-p", default=None, type=click.Choice(sorted(BUILTIN_PROFILES)),
    help="Scenario profile (default: full, or the one named in the config file)",
)
@click.option(
    "--config", "-c", "config_path", default=None,
    type=click.Path(exists=False, dir_okay=False, path_type=Path),
    help="TOML or JSON file overriding [network]/[env]/[sac]/[experiment] settings",
)
@click.option("--verbose", "-v", is_flag=True, help="Log library progress to stderr")
@click.version_option(package_name="risdrl")
@click.pass_context
def cli(ctx, profile: Optional[str], config_path: Optional[Path], verbose: bool):
    """risdrl - RIS-assisted multi-BS mmWave simulator with a SAC learner.

    Train a soft actor-critic agent to pick RIS steering angles and
    BS-RIS-UE associations, compare it with random-association, no-RIS and
    exhaustive-search references, and sweep scenario parameters.
    """
    if verbose:
        logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")
    ctx.ensure_object(dict)
    ctx.obj = Context(profile=profile, config_path=config_path)


@cli.command("profiles")
def list_profiles():
    """Show the built-in scenario profiles."""
    for name in sorted(BUILTIN_PROFILES):
        p = get_profile(name)
        net = p.network
        click.echo(f"  {name:<6} J={net.num_bs} K={net.num_ue} N={net.num_antennas} "
                   f"M={net.ris_h}x{net.ris_v} B={p.env.bits}  {p.description}")


@cli.command()
@click.option("--seed", type=int, default=None, help="Seed (RISDRL_SEED overrides)")
@click.option("--output", "-o", type=click.Path(file_okay=False, path_type=Path),
              default=Path("results/train"), help="Output directory")
@click.option("--episodes", type=int, default=None, help="Override the number of episodes")
@click.option("--label", default=None, help="Run label for the registry")
@pass_ctx
def train(ctx: Context, seed: Optional[int], output: Path, episodes: Optional[int], label: Optional[str]):
    """Train the SAC agent and save its curve, checkpoint and config."""
    from risdrl.db.store import Store
    from risdrl.env.mdp import RisEnv
    from risdrl.export.csv_export import write_curve_csv
    from risdrl.export.json_export import build_sidecar, write_sidecar
    from risdrl.sac.agent import SacAgent
    from risdrl.sac.checkpoint import save_checkpoint
    from risdrl.sac.trainer import train as run_training

    cfg = ctx.config
    seed = ctx.seed(seed)
    env = RisEnv(cfg.env, seed=seed)
    agent = SacAgent(env.state_dim, env.action_dim, cfg.sac, seed=seed)
    total = cfg.env.episodes if episodes is None else episodes
    every = max(1, total // 10)

    def progress(row):
        if (row.episode + 1) % every == 0 or row.episode + 1 == total:
            click.echo(f"  episode {row.episode + 1:>5}/{total}  reward {row.mean_reward:9.4f}  "
                       f"eval {row.eval_reward:9.4f}  alpha {row.alpha:.4g}")

    click.echo(f"Training on profile '{cfg.profile}' (state {env.state_dim}, action {env.action_dim}, "
               f"seed {seed})...")
    t0 = time.perf_counter()
    log = run_training(env, agent, episodes=total, seed=seed, on_episode=progress, log_interval=0)
    click.echo(f"Trained {len(log)} episodes ({agent.updates:,} updates) in {time.perf_counter() - t0:.1f}s")

    name = f"train_seed{seed}"
    curve_path = write_curve_csv(output / f"{name}.csv", log.episodes)
    save_checkpoint(agent, output / f"{name}.ckpt")
    write_sidecar(output / f"{name}.json",
                  build_sidecar(cfg.env, cfg.sac, [seed], cfg.profile, {"episodes": total}))

    with Store(ctx.db) as store:
        run_id = store.create_run(label or name, "train", config_hash(cfg.env, cfg.sac),
                                  seed=seed, output_dir=str(output))
        store.insert_episodes(run_id, name, log.episodes)
        store.update_run_count(run_id, len(log))

    final = log.final()
    if final is not None:
        click.echo(f"Final policy: {_describe(final.theta, final.phi, final.ris_bs, final.ue_bs)}")
        click.echo(f"Best step:    {_describe(final.best_theta, final.best_phi, final.best_ris_bs, final.best_ue_bs)}"
                   f" (reward {final.best_step_reward:.4f})")
    click.echo(f"\nRun #{run_id} saved. Curve: {curve_path}")


@cli.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--output", "-o", type=click.Path(file_okay=False, path_type=Path),
              default=None, help="Output directory (default: from the experiment file, else ./results)")
@pass_ctx
def sweep(ctx: Context, spec_path: Path, output: Optional[Path]):
    """Run an experiment sweep described by SPEC_PATH's [experiment] section."""
    from risdrl.db.store import Store
    from risdrl.experiments.runner import ExperimentSpec, run_experiment

    cfg = resolve_config(ctx.requested_profile, ctx.config_path, spec_path)
    try:
        spec = ExperimentSpec.from_mapping(cfg.experiment, output_dir=output)
    except (RisDrlError, TypeError) as exc:
        raise click.UsageError(f"Invalid [experiment] in {spec_path}: {exc}")

    cells = len(spec.sweep_values) * len(spec.seeds) * len(spec.methods)
    click.echo(f"Sweeping {spec.sweep_variable} over {len(spec.sweep_values)} value(s), "
               f"{len(spec.seeds)} seed(s), methods {', '.join(spec.methods)}: {cells} cell(s)")

    def progress(row):
        click.echo(f"  {row.method:<7} {spec.sweep_variable}={row.sweep_value:<8g} seed={row.seed:<4} "
                   f"sum-rate {row.sum_rate:.4f}")

    with Store(derive_db_path(cfg.profile)) as store:
        try:
            result = run_experiment(spec, cfg.env, cfg.sac, profile=cfg.profile, store=store, on_row=progress)
        except RisDrlError as exc:
            raise click.ClickException(str(exc))

    click.echo(f"\nRun #{result.run_id}: {len(result.rows)} row(s) in {result.elapsed:.1f}s "
               f"-> {spec.metrics_path}")


@cli.command()
@click.option("--seed", type=int, default=None, help="Seed (RISDRL_SEED overrides)")
@pass_ctx
def oracle(ctx: Context, seed: Optional[int]):
    """Exhaustive search over every decoded configuration of one realization."""
    from risdrl.env.mdp import RisEnv
    from risdrl.experiments.baselines import exhaustive_search, oracle_size

    cfg = ctx.config
    seed = ctx.seed(seed)
    env = RisEnv(cfg.env, seed=seed)
    env.reset(seed=seed)
    click.echo("Enumerating configurations...", nl=False)
    t0 = time.perf_counter()
    try:
        found = exhaustive_search(env)
    except RisDrlError as exc:
        click.echo(" refused")
        raise click.ClickException(str(exc))
    click.echo(f" {found.evaluated:,} of {oracle_size(env):,} in {time.perf_counter() - t0:.1f}s")
    click.echo(f"Best sum-rate: {found.reward:.6f} bps/Hz")
    click.echo(f"Configuration: {_describe(found.theta, found.phi, found.assoc.ris_bs, found.assoc.ue_bs)}")


@cli.command()
@click.option("--seed", type=int, default=None, help="Seed (RISDRL_SEED overrides)")
@click.option("--trials", type=int, default=1000, show_default=True, help="Random-association trials")
@pass_ctx
def baselines(ctx: Context, seed: Optional[int], trials: int):
    """Random association and no-RIS references on one realization."""
    import numpy as np

    from risdrl.env.mdp import RisEnv
    from risdrl.experiments.baselines import baseline_no_ris, baseline_random_association

    cfg = ctx.config
    seed = ctx.seed(seed)
    env = RisEnv(cfg.env, seed=seed)
    env.reset(seed=seed)
    if trials < 1:
        raise click.BadParameter("must be >= 1", param_hint="--trials")

    t0 = time.perf_counter()
    ra = baseline_random_association(env, np.random.default_rng(seed), trials)
    no_ris = baseline_no_ris(env)
    click.echo(f"RA      ({trials} trials): {ra.mean_reward:.6f} +/- {ra.stderr:.6f} bps/Hz")
    click.echo(f"No RIS  ({no_ris.evaluated} assoc.): {no_ris.reward:.6f} bps/Hz")
    click.echo(f"Done in {time.perf_counter() - t0:.1f}s")


@cli.command()
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=int, default=None, help="Seed (RISDRL_SEED overrides)")
@click.option("--realizations", type=int, default=5, show_default=True,
              help="Channel realizations to evaluate on")
@pass_ctx
def evaluate(ctx: Context, checkpoint: Path, seed: Optional[int], realizations: int):
    """Deterministic evaluation of a saved agent."""
    import numpy as np

    from risdrl.env.mdp import RisEnv
    from risdrl.sac.checkpoint import load_checkpoint

    cfg = ctx.config
    seed = ctx.seed(seed)
    try:
        agent = load_checkpoint(checkpoint, seed=seed)
    except ValueError as exc:
        raise click.UsageError(f"Cannot read checkpoint {checkpoint}: {exc}")
    env = RisEnv(cfg.env, seed=seed)
    if (agent.state_dim, agent.action_dim) != (env.state_dim, env.action_dim):
        raise click.UsageError(
            f"Checkpoint dimensions (state {agent.state_dim}, action {agent.action_dim}) do not match "
            f"profile '{cfg.profile}' (state {env.state_dim}, action {env.action_dim})")

    rewards = []
    for i in range(realizations):
        state = env.reset(seed=seed if i == 0 else None)
        total = 0.0
        for _ in range(cfg.env.steps_per_episode):
            state, reward, _ = env.step(agent.act(state, deterministic=True))
            total += reward
        rewards.append(total / cfg.env.steps_per_episode)
        click.echo(f"  realization {i + 1}: mean reward {rewards[-1]:.6f}")
    click.echo(f"Mean over {realizations}: {float(np.mean(rewards)):.6f} bps/Hz")


@cli.command("list")
@pass_ctx
def list_runs(ctx: Context):
    """List registered runs."""
    from risdrl.db.store import Store

    store = Store(ctx.db)
    runs = store.list_runs()
    store.close()

    if not runs:
        click.echo("No runs found. Run 'risdrl train' or 'risdrl sweep' first.")
        return

    click.echo(f"{'ID':>4}  {'Label':<30}  {'Kind':<8}  {'Created':<20}  {'Rows':>6}  {'Config':<12}")
    click.echo("-" * 90)
    for r in runs:
        click.echo(f"{r.id:>4}  {r.label:<30}  {r.kind:<8}  {r.created_at:<20}  {r.row_count:>6}  {r.short_hash}")


@cli.command()
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), required=True)
@click.option("--run", "run_id", type=int, help="Run ID (default: latest)")
@click.option("--curve", default=None, help="Export one training curve instead of metrics (CSV only)")
@click.option("--output", "-o", type=click.Path(), help="Output file path")
@pass_ctx
def export(ctx: Context, fmt: str, run_id: Optional[int], curve: Optional[str], output: Optional[str]):
    """Export a stored run as CSV or JSON."""
    from risdrl.db.store import Store

    store = Store(ctx.db)

    if run_id is None:
        run = store.get_latest_run()
        if run is None:
            click.echo("No runs found.")
            store.close()
            return
        run_id = run.id
    elif store.get_run(run_id) is None:
        store.close()
        raise click.UsageError(f"Run {run_id} not found")

    if fmt == "csv":
        from risdrl.export.csv_export import export_csv
        data = export_csv(store, run_id, curve)
    else:
        from risdrl.export.json_export import export_json
        data = export_json(store, run_id)

    if output:
        Path(output).write_text(data, encoding="utf-8")
        click.echo(f"Exported to {output}")
    else:
        click.echo(data)

    store.close()


@cli.command()
@click.option("--keep", type=int, default=5, help="Number of recent runs to keep")
@pass_ctx
def purge(ctx: Context, keep: int):
    """Delete old runs, keeping the N most recent."""
    from risdrl.db.store import Store

    store = Store(ctx.db)
    count = store.purge_old_runs(keep)
    store.close()

    if count:
        click.echo(f"Deleted {count} old run(s). Kept {keep} most recent.")
    else:
        click.echo("Nothing to purge.")


@cli.command()
@click.option("--yes", is_flag=True, help="Skip confirmation prompt")
@pass_ctx
def clear(ctx: Context, yes: bool):
    """Delete ALL runs from the registry."""
    from risdrl.db.store import Store

    store = Store(ctx.db)
    total = len(store.list_runs())

    if total == 0:
        click.echo("Registry is already empty.")
        store.close()
        return

    if not yes:
        click.confirm(f"Delete all {total} run(s)?", abort=True)

    count = store.clear_all_runs()
    store.close()
    click.echo(f"Deleted {count} run(s).")
