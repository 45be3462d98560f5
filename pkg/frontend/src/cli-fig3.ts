/** Usage: node dist/cli-fig3.js --in branch_n0.csv,branch_n1.csv --out fig3.svg */

import * as fs from "fs";
import { renderFig3 } from "./fig3";
import { parseArgs } from "./args";

function main(): number {
  let parsed;
  try {
    parsed = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  try {
    const svg = renderFig3(parsed.inputs);
    fs.writeFileSync(parsed.out, svg, "utf-8");
    console.log(parsed.out);
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

process.exitCode = main();
