/** Tiny --in/--out argument parser shared by the figure CLIs. */

export interface FigureArgs {
  inputs: string[];
  out: string;
}

export function parseArgs(argv: string[]): FigureArgs {
  let inputs: string[] | null = null;
  let out: string | null = null;
  for (let i = 0; i < argv.length; i += 1) {
    if (argv[i] === "--in") {
      inputs = (argv[i + 1] ?? "").split(",").filter((s) => s.length > 0);
      i += 1;
    } else if (argv[i] === "--out") {
      out = argv[i + 1] ?? null;
      i += 1;
    } else {
      throw new Error(`unknown argument: ${argv[i]}`);
    }
  }
  if (!inputs || inputs.length === 0) {
    throw new Error("missing --in <csv[,csv...]>");
  }
  if (!out) {
    throw new Error("missing --out <svg>");
  }
  return { inputs, out };
}
