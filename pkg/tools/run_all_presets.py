#!/usr/bin/env python3
"""
Script to run every shipped vphermite preset with its matching subcommand.
Each preset writes into its own subdirectory of the output directory.
"""

import argparse
import subprocess
import sys
from pathlib import Path

# Subcommand used for each shipped preset
PRESET_COMMANDS = {
    "fig10": "convergence",
    "convergence_alpha_half": "convergence",
    "convergence_alpha_one": "convergence",
    "ap_sweep": "ap-sweep",
    "temporal_order": "convergence",
    "smooth_perturbation": "run",
    "oscillatory_perturbation": "run",
    "two_stream": "run",
}


def run_preset(
    preset: str,
    subcommand: str,
    output_dir: Path,
    vphermite_command: str,
    overrides: list[str],
) -> tuple[bool, str]:
    """Run one preset; returns (success, output directory or error)."""
    target = output_dir / preset
    cmd_args = [
        *vphermite_command.split(),
        subcommand,
        "--preset",
        preset,
        "--out",
        str(target),
    ]
    for override in overrides:
        cmd_args.extend(["--override", override])

    try:
        result = subprocess.run(cmd_args, check=False, capture_output=True, text=True)
    except OSError as e:
        return False, f"Exception: {e!s}"

    if result.returncode == 0:
        return True, str(target)
    error_msg = (result.stderr or result.stdout).strip().splitlines()
    return False, f"exit code {result.returncode}: {error_msg[-1] if error_msg else 'no output'}"


def parse_args():
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="Run all shipped vphermite presets",
    )
    parser.add_argument(
        "--output-dir",
        "-o",
        type=Path,
        default=Path.cwd() / "runs",
        help="Output directory for preset runs (default: ./runs)",
    )
    parser.add_argument(
        "--vphermite-command",
        "-c",
        default="vphermite",
        help="Command to run vphermite (default: vphermite)",
    )
    parser.add_argument(
        "--only",
        action="append",
        choices=sorted(PRESET_COMMANDS),
        help="Run only the named preset. Can be specified multiple times.",
    )
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        help="Configuration override passed to every run, e.g. scheme.t_final=1.0",
    )
    return parser.parse_args()


def main():
    """Main function to run all presets."""
    args = parse_args()
    presets = args.only or list(PRESET_COMMANDS)

    print("🚀 Running vphermite presets...")
    print(f"📁 Output directory: {args.output_dir}")
    print(f"🔧 vphermite command: {args.vphermite_command}")
    args.output_dir.mkdir(parents=True, exist_ok=True)

    successful = []
    failed = []
    for i, preset in enumerate(presets, 1):
        subcommand = PRESET_COMMANDS[preset]
        print(f"\n[{i}/{len(presets)}] {preset} ({subcommand})")
        success, result = run_preset(
            preset,
            subcommand,
            args.output_dir,
            args.vphermite_command,
            args.override,
        )
        if success:
            print(f"    ✅ Output: {result}")
            successful.append((preset, result))
        else:
            print(f"    ❌ Failed: {result}")
            failed.append((preset, result))

    print("\n📊 Summary:")
    print(f"  Presets run: {len(presets)}")
    print(f"  Successful: {len(successful)}")
    print(f"  Failed: {len(failed)}")
    if failed:
        print("\n❌ Failed presets:")
        for preset, error in failed:
            print(f"  • {preset}: {error}")

    print("\n🏁 Preset runs complete!")
    return 0 if not failed else 1


if __name__ == "__main__":
    sys.exit(main())
