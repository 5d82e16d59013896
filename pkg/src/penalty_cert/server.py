"""
server.py — penalty-cert MCP Server entry point

Registers the seven certificate commands as tools and starts the MCP Server.

Startup (stdio mode):
  python -m penalty_cert.server

Example client configuration (mcp.json):
  {
    "penalty-cert": {
      "command": "python",
      "args": ["-m", "penalty_cert.server"],
      "cwd": "/path/to/penalty-cert-mcp",
      "env": { "PYTHONPATH": "src" }
    }
  }
"""

import json
import logging
from typing import Any

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool

from penalty_cert.cli import execute
from penalty_cert.command import CommandSpec
from penalty_cert.config import configure_logging

logger = logging.getLogger(__name__)

app = Server("penalty-cert-mcp")


# ─────────────────────────────────────────
# Tool definitions (Tool Schema)
# ─────────────────────────────────────────

_PROBLEM = {"type": "string", "description": "Path to the problem file (TOML with [problem] and [candidate])"}
_OUT = {"type": "string", "description": "Optional path; for penalty_path the CSV is written next to it"}
_SCHEDULE = {
    "t0": {"type": "number", "description": "Largest sampling scale t_0"},
    "ratio": {"type": "number", "description": "Geometric ratio of the scale ladder, in (0, 1)"},
    "levels": {"type": "integer", "description": "Number of ladder levels K"},
    "samples": {"type": "integer", "description": "Directions sampled per level M"},
    "seed": {"type": "integer", "description": "Seed for every random draw"},
}
_DIRS = {"type": "integer", "description": "Number of sampled unit directions", "default": 16}
_GAMMA = {"type": "number", "description": "Penalty weight γ; default exactness threshold + 1"}
_SET = {"type": "string", "enum": ["X", "G", "S"], "default": "S", "description": "Constraint set"}


def _schema(**props) -> dict:
    return {
        "type": "object",
        "properties": {"problem_path": _PROBLEM, **props, **_SCHEDULE},
        "required": ["problem_path"],
    }


TOOLS: list[Tool] = [
    # ── Derivatives ──
    Tool(
        name="derivative",
        description="Estimate the lower Hadamard derivative of f at the candidate over X, G or S on sampled directions. Verdict: ld f(x̄;u;set) >= 0 everywhere.",
        inputSchema=_schema(dirs=_DIRS, set_name=_SET),
    ),
    Tool(
        name="tangent",
        description="Report which sampled unit directions lie in the Bouligand tangent cone of X, G or S at the candidate.",
        inputSchema=_schema(dirs=_DIRS, set_name=_SET),
    ),
    # ── Penalty ──
    Tool(
        name="penalty_path",
        description="Minimize the exact penalty F(x,γ) over G_δ for γ = 0, step, ..., gamma_max and report the exactness threshold. Optionally checks linear growth with constant growth_A.",
        inputSchema=_schema(
            gamma_max={"type": "number", "default": 3.0},
            gamma_step={"type": "number", "default": 0.25},
            grid_step={"type": "number", "default": 1e-3},
            match_tol={"type": "number", "default": 1e-2},
            growth_A={"type": "number", "description": "Growth constant A > 0"},
            output_path=_OUT,
        ),
    ),
    # ── Certificates ──
    Tool(
        name="check_cq",
        description="Check the constraint qualification d(x) <= -a on sampled points near the candidate outside S.",
        inputSchema=_schema(
            a={"type": "number", "default": 0.5},
            points={"type": "integer", "default": 20},
            dirs=_DIRS,
        ),
    ),
    Tool(
        name="certify_fj",
        description="Fritz John necessary condition: a nonstrict multiplier certificate for every sampled direction.",
        inputSchema=_schema(gamma=_GAMMA, dirs=_DIRS),
    ),
    Tool(
        name="certify_isolated",
        description="Sufficient condition: strict multiplier certificates on every sampled direction certify an isolated local minimizer.",
        inputSchema=_schema(gamma=_GAMMA, dirs=_DIRS, strict_tol={"type": "number", "default": 5e-2}),
    ),
    Tool(
        name="check_abadie",
        description="Compare the tangent cone of G with the linearized cone at the candidate on sampled directions.",
        inputSchema=_schema(dirs=_DIRS),
    ),
]


@app.list_tools()
async def list_tools() -> list[Tool]:
    return TOOLS


@app.call_tool()
async def call_tool(name: str, arguments: dict[str, Any]) -> list[TextContent]:
    """Unified tool call entry point; routes to the corresponding pipeline by tool name."""
    try:
        result = await _dispatch(name, arguments)
        return [TextContent(type="text", text=json.dumps(result, ensure_ascii=False, indent=2))]
    except Exception as e:
        logger.error("Tool %s execution failed: %s", name, e, exc_info=True)
        return [TextContent(type="text", text=json.dumps({"error": str(e)}, ensure_ascii=False))]


async def _dispatch(name: str, args: dict) -> Any:
    """Tool name → command name; arguments become CommandSpec fields."""
    command = name.replace("_", "-")
    if name not in {t.name for t in TOOLS}:
        raise ValueError(f"Unknown tool: {name}")
    spec = CommandSpec(command=command, **args)
    report = execute(spec, write_csv=spec.output_path is not None)
    return report.model_dump(mode="json")


# ─────────────────────────────────────────
# Entry point
# ─────────────────────────────────────────

def main():
    import asyncio
    configure_logging()
    logger.info("penalty-cert MCP Server starting (stdio mode)...")
    asyncio.run(_run())


async def _run():
    async with stdio_server() as (read_stream, write_stream):
        await app.run(read_stream, write_stream, app.create_initialization_options())


if __name__ == "__main__":
    main()
