import type { QueryResult, Template } from "../src/api.js";

export const SAMPLE_TEMPLATES: Template[] = [
  {
    id: "one-slot",
    text: "Find microbes sampled at {day} days",
    slots: [
      { name: "day", kind: "enum", values: ["80", "100"], min: null, max: null },
    ],
  },
  {
    id: "two-slot",
    text: "Compare {day_a} against {day_b}",
    slots: [
      { name: "day_a", kind: "enum", values: ["180"], min: null, max: null },
      { name: "day_b", kind: "enum", values: ["80", "131"], min: null, max: null },
    ],
  },
];

export function sampleResult(overrides: Partial<QueryResult> = {}): QueryResult {
  return {
    query_id: "q-test",
    columns: [
      { name: "Microbe_name", kind: "scalar" },
      { name: "Gene_kegg_pathway", kind: "link" },
    ],
    rows: [
      ["Prevotella copri", "http://example.test/path/map00010"],
      ["Lactobacillus", "http://example.test/path/map04620"],
    ],
    timings: { total: 0.042 },
    cache_hit: false,
    warnings: [],
    ...overrides,
  };
}

/** Deterministic pseudo-random generator for the fuzz rendering test. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const NASTY_VALUES = [
  "",
  " ",
  "<script>alert(1)</script>",
  "line\nbreak",
  "tab\tseparated",
  "ünïcødé ✓",
  "http://example.test/x?a=1&b=2",
  "https://example.test/ok",
  "not a url",
  "0",
  '"quoted"',
  "&amp;",
];

export function randomResult(rand: () => number): QueryResult {
  const pick = <T>(items: T[]): T => items[Math.floor(rand() * items.length)]!;
  const nColumns = 1 + Math.floor(rand() * 5);
  const columns = Array.from({ length: nColumns }, (_, i) => ({
    name: `col_${i}`,
    kind: rand() < 0.3 ? "link" : "scalar",
  }));
  const nRows = Math.floor(rand() * 8);
  const rows = Array.from({ length: nRows }, () =>
    columns.map(() => pick(NASTY_VALUES)),
  );
  return {
    query_id: `fuzz-${Math.floor(rand() * 1e6)}`,
    columns,
    rows,
    timings: { total: rand() },
    cache_hit: rand() < 0.5,
    warnings: rand() < 0.3 ? ["possible cartesian product"] : [],
  };
}
