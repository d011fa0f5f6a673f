"""Command-line front end.

One subcommand per pipeline stage plus an end-to-end `align`. Pipeline
failures exit 1 with the error class named; usage mistakes exit 2 via
click. Every stage that takes tuning knobs accepts a JSON config file,
with explicit flags winning, and echoes the effective values next to
its outputs so runs stay reproducible.
"""

from __future__ import annotations

import csv
import functools
import json
import logging
import sys
from pathlib import Path

import click

from asap_align import aligner, dataset, extractor, locator, queries, synth, verify
from asap_align.commentary import adjust_timestamps, load_commentary_file
from asap_align.errors import AsapError
from asap_align.extractor import ExtractionConfig
from asap_align.imgio import FrameSequence
from asap_align.model import Roi
from asap_align.ocr.mock import TemplateRecognizer
from asap_align.ocr.remote import RemoteConfig, RemoteRecognizer
from asap_align.profiles import get_profile, load_profiles

log = logging.getLogger(__name__)


def _pipeline_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (AsapError, ValueError) as exc:
            raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc
    return wrapper


def _profile_option(fn):
    return click.option(
        "--profile", "profile_name", required=True,
        type=click.Choice(sorted(load_profiles())), help="Sport profile."
    )(fn)


def _ocr_options(fn):
    for opt in reversed([
        click.option("--ocr", type=click.Choice(["mock", "remote"]), default="mock",
                     show_default=True, help="Recognizer backend."),
        click.option("--ocr-url", default=None, help="Remote OCR endpoint."),
        click.option("--ocr-key-env", default=None,
                     help="Environment variable holding the remote API key."),
        click.option("--ocr-corrupt", type=float, default=0.0, show_default=True,
                     help="Mock per-digit corruption probability."),
        click.option("--ocr-seed", type=int, default=0, show_default=True,
                     help="Mock corruption seed."),
    ]):
        fn = opt(fn)
    return fn


def _recognizer(ocr, ocr_url, ocr_key_env, ocr_corrupt, ocr_seed):
    if ocr == "remote":
        if not ocr_url:
            raise click.UsageError("--ocr remote needs --ocr-url")
        return RemoteRecognizer(RemoteConfig(url=ocr_url, api_key_env=ocr_key_env))
    return TemplateRecognizer(corrupt_digit_p=ocr_corrupt, seed=ocr_seed)


_EXTRACT_KNOBS = (
    "reject_threshold", "change_threshold", "stack_capacity", "repair_window",
    "columns", "padding", "dedup", "ocr_probes",
)


def _extract_options(fn):
    for opt in reversed([
        click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                     help="JSON file of extraction knobs; flags override it."),
        click.option("--reject-threshold", type=float, default=None,
                     help="Mean L1 vs the reference above which a frame is occluded."),
        click.option("--change-threshold", type=float, default=None,
                     help="Mean L1 vs the dedup baseline below which a frame is unchanged."),
        click.option("--stack-capacity", type=int, default=None,
                     help="Crops per recognizer call."),
        click.option("--repair-window", type=int, default=None,
                     help="Vote window, in frames, around a suspect observation."),
        click.option("--columns", type=int, default=None, help="Stack grid columns."),
        click.option("--padding", type=int, default=None, help="Stack grid padding, px."),
        click.option("--dedup", type=click.Choice(["last-accepted", "consecutive"]),
                     default=None, help="Dedup baseline policy."),
        click.option("--ocr-probes", type=int, default=None,
                     help="Reads per accepted crop, majority voted."),
    ]):
        fn = opt(fn)
    return fn


def _extraction_config(config_path, **flags) -> ExtractionConfig:
    values = {}
    if config_path:
        with open(config_path) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(_EXTRACT_KNOBS)
        if unknown:
            raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    values.update({k: v for k, v in flags.items() if v is not None})
    try:
        return ExtractionConfig(**values)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None


def _echo_config(config: ExtractionConfig, out_dir: Path) -> None:
    payload = {k: getattr(config, k) for k in _EXTRACT_KNOBS}
    with open(out_dir / "config.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


@click.group()
@click.option("--log-level", default="warning", show_default=True,
              type=click.Choice(["debug", "info", "warning", "error"]))
@click.version_option(package_name="asap-align")
def main(log_level):
    """Align broadcast frames with play-by-play via the on-screen scorecard."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command("synth")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True), default=None,
              help="Scenario JSON; omit to use the built-in cricket preset.")
@click.option("--events", type=int, default=36, show_default=True,
              help="Preset: number of deliveries.")
@click.option("--seed", type=int, default=0, show_default=True, help="Preset: seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@_pipeline_errors
def synth_cmd(scenario_path, events, seed, out_dir):
    """Generate a synthetic broadcast with ground truth."""
    if scenario_path:
        with open(scenario_path) as fh:
            scenario = synth.Scenario.from_dict(json.load(fh))
    else:
        scenario = synth.Scenario(
            sport="cricket",
            match_id=f"synth-{seed:04d}",
            seed=seed,
            steps=synth.cricket_steps(synth.sample_tokens(events, seed), seed=seed),
        )
    result = synth.generate_match(scenario, out_dir)
    click.echo(f"wrote {len(result.frames)} frames, {len(result.chain)} events to {out_dir}")


@main.command("locate")
@click.option("--frames", "frames_dir", required=True, type=click.Path(exists=True))
@_profile_option
@click.option("--samples", type=int, default=locator.DEFAULT_SAMPLES, show_default=True)
@click.option("--iou", type=float, default=locator.DEFAULT_IOU, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@_ocr_options
@_pipeline_errors
def locate_cmd(frames_dir, profile_name, samples, iou, out_dir, **ocr_flags):
    """Find the scorecard ROI and write the locator report."""
    seq = FrameSequence(frames_dir)
    profile = get_profile(profile_name)
    rec = _recognizer(**ocr_flags)
    # shorter sequences than the sample budget just use every frame
    sampled = [seq.frame(i) for i in locator.sample_indices(seq.count, min(samples, seq.count))]
    result = locator.locate_scorecard(sampled, rec, profile, iou_threshold=iou)
    report = locator.write_report(result, out_dir)
    click.echo(f"scorecard {result.roi} score {result.score:.3f}; report at {report}")


@main.command("extract")
@click.option("--frames", "frames_dir", required=True, type=click.Path(exists=True))
@click.option("--locator-dir", type=click.Path(exists=True), required=True,
              help="Directory holding the locate outputs.")
@_profile_option
@click.option("--out", "out_dir", required=True, type=click.Path())
@_ocr_options
@_extract_options
@_pipeline_errors
def extract_cmd(frames_dir, locator_dir, profile_name, out_dir, config_path, **flags):
    """Extract state intervals using a previously located scorecard."""
    ocr_flags = {k: flags.pop(k) for k in ("ocr", "ocr_url", "ocr_key_env",
                                           "ocr_corrupt", "ocr_seed")}
    config = _extraction_config(config_path, **flags)
    seq = FrameSequence(frames_dir)
    profile = get_profile(profile_name)
    rec = _recognizer(**ocr_flags)
    roi, reference = locator.read_report(locator_dir)
    result = extractor.extract_intervals(
        seq.iter_frames(), roi, reference, rec, config, profile, seq.fps
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    extractor.write_intervals(result.intervals, out / "intervals.jsonl")
    extractor.write_observations(result.observations, out / "observations.csv")
    _echo_config(config, out)
    click.echo(
        f"{len(result.intervals)} intervals from {len(result.observations)} frames "
        f"in {result.ocr_calls} recognizer calls"
    )


@main.command("align")
@click.option("--frames", "frames_dir", required=True, type=click.Path(exists=True))
@click.option("--commentary", "commentary_path", required=True, type=click.Path(exists=True))
@_profile_option
@click.option("--samples", type=int, default=locator.DEFAULT_SAMPLES, show_default=True)
@click.option("--allow-duplicate-states", is_flag=True,
              help="Accept repeated over.ball keys (wides).")
@click.option("--out", "out_dir", required=True, type=click.Path())
@_ocr_options
@_extract_options
@_pipeline_errors
def align_cmd(frames_dir, commentary_path, profile_name, samples,
              allow_duplicate_states, out_dir, config_path, **flags):
    """Locate, extract, and join commentary; writes chain.jsonl and aligned.srt."""
    ocr_flags = {k: flags.pop(k) for k in ("ocr", "ocr_url", "ocr_key_env",
                                           "ocr_corrupt", "ocr_seed")}
    config = _extraction_config(config_path, **flags)
    seq = FrameSequence(frames_dir)
    profile = get_profile(profile_name)
    rec = _recognizer(**ocr_flags)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    sampled = [seq.frame(i) for i in locator.sample_indices(seq.count, min(samples, seq.count))]
    located = locator.locate_scorecard(sampled, rec, profile)
    locator.write_report(located, out)
    result = extractor.extract_intervals(
        seq.iter_frames(), located.roi, located.reference, rec, config, profile, seq.fps
    )
    extractor.write_intervals(result.intervals, out / "intervals.jsonl")
    extractor.write_observations(result.observations, out / "observations.csv")

    entries = load_commentary_file(commentary_path, profile, allow_duplicate_states)
    entries = adjust_timestamps(entries, profile)
    joined = aligner.align(result.intervals, entries, seq.fps, profile)
    aligner.write_chain(joined.events, out / "chain.jsonl")
    if joined.events:
        (out / "aligned.srt").write_text(aligner.to_srt(joined.events))
    report = {
        "events": len(joined.events),
        "unmatched_entries": [e.state_text for e in joined.unmatched_entries],
        "unmatched_intervals": len(joined.unmatched_intervals),
        "ambiguous": joined.ambiguous,
        "ocr_calls": result.ocr_calls,
        "dropped_frames": list(result.dropped_frames),
    }
    with open(out / "align_report.json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    _echo_config(config, out)
    click.echo(
        f"aligned {len(joined.events)}/{len(entries)} entries onto "
        f"{len(result.intervals)} intervals"
    )


@main.command("segment")
@click.option("--chain", "chain_path", required=True, type=click.Path(exists=True))
@click.option("--overs", "overs_per_clip", type=int, default=10, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@_pipeline_errors
def segment_cmd(chain_path, overs_per_clip, out_path):
    """Cut an aligned chain into whole-over clips."""
    events = aligner.read_chain(chain_path)
    clips = dataset.segment_clips(events, overs_per_clip)
    dataset.write_clips(clips, out_path)
    click.echo(f"{len(clips)} clips of {overs_per_clip} overs -> {out_path}")


@main.command("split")
@click.option("--matches", "matches_path", required=True, type=click.Path(exists=True),
              help='JSON {"matches": [{"id": ..., "hours": ...}, ...]}.')
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@_pipeline_errors
def split_cmd(matches_path, seed, out_path):
    """Split matches into train/val/test by hours."""
    with open(matches_path) as fh:
        payload = json.load(fh)
    matches = [(m["id"], float(m["hours"])) for m in payload["matches"]]
    split = dataset.split_dataset(matches, seed)
    with open(out_path, "w") as fh:
        json.dump(split.to_dict(), fh, indent=2)
        fh.write("\n")
    total = sum(split.hours.values())
    shares = ", ".join(f"{k} {v / total:.1%}" for k, v in split.hours.items())
    click.echo(f"split {len(matches)} matches: {shares}")


@main.command("export")
@click.option("--frames", "frames_dir", required=True, type=click.Path(exists=True))
@click.option("--clips", "clips_path", required=True, type=click.Path(exists=True))
@click.option("--clip-index", type=int, default=0, show_default=True)
@click.option("--locator-dir", type=click.Path(exists=True), default=None,
              help="Mask the ROI from this locate run.")
@click.option("--roi", "roi_text", default=None, help="Mask ROI as x,y,w,h.")
@click.option("--fps", "fps_target", type=float, default=0.1, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@_pipeline_errors
def export_cmd(frames_dir, clips_path, clip_index, locator_dir, roi_text, fps_target, out_dir):
    """Export one clip's frames masked, subsampled, and resized."""
    if (locator_dir is None) == (roi_text is None):
        raise click.UsageError("pass exactly one of --locator-dir or --roi")
    if roi_text:
        try:
            x, y, w, h = (int(v) for v in roi_text.split(","))
        except ValueError:
            raise click.UsageError("--roi wants four integers: x,y,w,h") from None
        roi = Roi(x, y, w, h)
    else:
        roi, _ = locator.read_report(locator_dir)
    clips = dataset.read_clips(clips_path)
    if not 0 <= clip_index < len(clips):
        raise click.UsageError(f"clip index {clip_index} outside 0..{len(clips) - 1}")
    seq = FrameSequence(frames_dir)
    manifest = dataset.export_clip_frames(clips[clip_index], seq, roi, out_dir, fps_target)
    click.echo(f"exported {manifest['count']} frames to {out_dir}")


@main.command("verify")
@click.option("--chain", "chain_path", required=True, type=click.Path(exists=True))
@click.option("--marks", "marks_path", required=True, type=click.Path(exists=True))
@_profile_option
@_pipeline_errors
def verify_cmd(chain_path, marks_path, profile_name):
    """Score a chain against human timestamp marks."""
    events = aligner.read_chain(chain_path)
    marks = verify.read_marks(marks_path)
    result = verify.verify_alignment(events, marks, get_profile(profile_name))
    click.echo(f"accuracy {result.accuracy:.3f} ({result.correct}/{len(result.verdicts)})")


@main.group("queries")
def queries_group():
    """Generate, evaluate, and balance question sets."""


@queries_group.command("gen")
@click.option("--n", "n_queries", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--clip-overs", type=int, default=10, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@_pipeline_errors
def queries_gen_cmd(n_queries, seed, clip_overs, out_path):
    """Sample a binary query set from the grammar."""
    generated = queries.generate_query_set(n_queries, seed)
    queries.write_query_set(
        [("binary", q) for q in generated], out_path, clip_overs=clip_overs, seed=seed
    )
    click.echo(f"{n_queries} queries (seed {seed}) -> {out_path}")


@queries_group.command("eval")
@click.option("--queries", "queries_path", required=True, type=click.Path(exists=True))
@click.option("--clips", "clips_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@_pipeline_errors
def queries_eval_cmd(queries_path, clips_path, out_path):
    """Answer every query against every clip; writes a CSV."""
    query_set, _ = queries.read_query_set(queries_path)
    clips = dataset.read_clips(clips_path)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip", "query", "kind", "answer"])
        for ci, clip in enumerate(clips):
            chain = clip.tokens
            for qi, (kind, query) in enumerate(query_set):
                value = queries.answer(kind, query, chain)
                writer.writerow([ci, qi, kind, int(value)])
    click.echo(f"{len(clips)} clips x {len(query_set)} queries -> {out_path}")


@queries_group.command("balance")
@click.option("--queries", "queries_path", required=True, type=click.Path(exists=True))
@click.option("--clips", "clips_path", required=True, type=click.Path(exists=True))
@click.option("--low", type=float, default=queries.BALANCE_LOW, show_default=True)
@click.option("--high", type=float, default=queries.BALANCE_HIGH, show_default=True)
@click.option("--mode", type=click.Choice(["per-query", "set-average"]),
              default="per-query", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@_pipeline_errors
def queries_balance_cmd(queries_path, clips_path, low, high, mode, out_path):
    """Keep queries whose empirical probability sits in the balance band."""
    query_set, meta = queries.read_query_set(queries_path)
    binary = [q for kind, q in query_set if kind == "binary"]
    if len(binary) != len(query_set):
        raise click.UsageError("balance filtering applies to binary queries only")
    corpus = [clip.tokens for clip in dataset.read_clips(clips_path)]
    kept = queries.filter_balanced(binary, corpus, low, high, mode)
    queries.write_query_set(
        [("binary", q) for q in kept], out_path,
        clip_overs=meta.get("clip_overs", 10), seed=meta.get("seed"),
    )
    click.echo(f"kept {len(kept)}/{len(binary)} queries -> {out_path}")


if __name__ == "__main__":
    sys.exit(main())
