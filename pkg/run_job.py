#!/usr/bin/env python3
"""
gogsep Job Runner - Execute a batch of gogsep commands from a YAML job file

Usage:
    python run_job.py <job_file> [--output REPORT.json]
    python run_job.py --help

Example:
    python run_job.py configs/fixtures_job.yaml

A job file names a default problem file and a list of steps; every step is one
command with its flags spelled as keys:

    description: Golden run over the shipped fixtures
    input: fixtures/fix_e.json
    steps:
      - command: check
      - command: separate
        word: abab
        quotient: true
"""

import argparse
import importlib
import logging
import sys
import time
from argparse import Namespace
from typing import Any, Dict, List, Optional

from gogsep.errors import GogSepError, ProblemFileError
from gogsep.problem import write_json
from utils import (
    REPORT_FORMAT, console, create_progress_bar, create_table, load_yaml_config, print_error,
    print_info, print_success, print_warning,
)

logger = logging.getLogger(__name__)

STEP_COMMANDS = ['validate', 'check', 'search', 'separate', 'cover', 'tree', 'freesep']

STEP_DEFAULTS = {
    'help': False,
    'json': False,
    'text': False,
    'output': None,
    'verbose': 0,
    'quiet': True,
}


def step_namespace(step: Dict[str, Any], job: Dict[str, Any]) -> Namespace:
    """argparse-style namespace for one step; job-level input and config are inherited"""
    values = dict(STEP_DEFAULTS)
    values['input'] = job.get('input')
    values['config'] = job.get('config')
    for key, value in step.items():
        if key == 'command':
            continue
        values[key.replace('-', '_')] = value
    return Namespace(**values)


def run_steps(job: Dict[str, Any], fail_fast: bool = False) -> List[Dict[str, Any]]:
    """Run every step; failures are recorded with their exit code"""
    steps = job.get('steps') or []
    if not isinstance(steps, list):
        raise ProblemFileError("job 'steps' must be a list")
    results = []
    with create_progress_bar() as progress:
        task = progress.add_task("Running steps", total=len(steps))
        for index, step in enumerate(steps):
            command = step.get('command') if isinstance(step, dict) else None
            if command not in STEP_COMMANDS:
                raise ProblemFileError(f"step {index}: unknown command {command!r}")
            progress.update(task, description=f"{command} {step.get('input', job.get('input')) or ''}")
            module = importlib.import_module(f"commands.{command}")
            started = time.perf_counter()
            try:
                report = module.execute(step_namespace(step, job))
                results.append({"step": index, "command": command, "exit_code": 0, "report": report})
            except GogSepError as e:
                logger.info("step %d (%s) failed: %s", index, command, e)
                results.append({
                    "step": index, "command": command, "exit_code": e.exit_code,
                    "error": {"type": type(e).__name__, "message": str(e)},
                    "elapsed_seconds": round(time.perf_counter() - started, 4),
                })
                if fail_fast:
                    progress.advance(task)
                    break
            progress.advance(task)
    return results


def run_job(job_path: str, output: Optional[str] = None, fail_fast: bool = False) -> Dict[str, Any]:
    """
    Run a job from a YAML file

    Args:
        job_path: Path to the YAML job file
        output: Optional path for the combined JSON report
        fail_fast: Stop at the first failing step
    """
    job = load_yaml_config(job_path)
    if job is None:
        raise ProblemFileError(f"cannot read job file '{job_path}'")
    if not isinstance(job, dict):
        raise ProblemFileError(f"job file '{job_path}' must hold a mapping")

    print_info(f"Job: {job.get('description', job_path)}")
    results = run_steps(job, fail_fast=fail_fast)
    summary = {
        "format_version": REPORT_FORMAT,
        "command": "run",
        "job": job_path,
        "description": job.get("description", ""),
        "steps": results,
        "failed": sum(1 for r in results if r["exit_code"]),
    }

    rows = []
    for r in results:
        verdict = r["report"].get("verdict") if r.get("report") else r["error"]["type"]
        rows.append([r["step"], r["command"], verdict, r["exit_code"]])
    console.print(create_table(f"{len(results)} step(s)", ["Step", "Command", "Verdict", "Exit code"], rows))

    if output:
        write_json(summary, output)
        print_success(f"Job report written to: {output}")
    if summary["failed"]:
        print_warning(f"{summary['failed']} step(s) failed")
    else:
        print_success("All steps completed")
    return summary


def main():
    parser = argparse.ArgumentParser(description='Run a gogsep job file')
    parser.add_argument('job_file', help='Path to YAML job file')
    parser.add_argument('--output', '-o', help='Write the combined JSON report')
    parser.add_argument('--fail-fast', action='store_true', help='Stop at the first failing step')
    args = parser.parse_args()

    try:
        summary = run_job(args.job_file, output=args.output, fail_fast=args.fail_fast)
    except GogSepError as e:
        print_error(str(e))
        sys.exit(e.exit_code)
    sys.exit(1 if summary["failed"] else 0)


if __name__ == "__main__":
    main()
