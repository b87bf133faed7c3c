import { beforeEach, describe, expect, it } from "vitest";

import { renderError, renderResults } from "../src/results.js";
import { mulberry32, randomResult, sampleResult } from "./helpers.js";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="results"></div>';
  container = document.getElementById("results")!;
});

describe("renderResults", () => {
  it("renders header and one row per result row", () => {
    renderResults(container, sampleResult());
    const headers = [...container.querySelectorAll("th")].map(
      (th) => th.textContent,
    );
    expect(headers).toEqual(["Microbe_name", "Gene_kegg_pathway"]);
    expect(container.querySelectorAll("tbody tr")).toHaveLength(2);
  });

  it("renders link columns as hyperlinks and scalar columns as text", () => {
    renderResults(container, sampleResult());
    const firstRow = container.querySelector("tbody tr")!;
    const cells = firstRow.querySelectorAll("td");
    expect(cells[0]!.querySelector("a")).toBeNull();
    const anchor = cells[1]!.querySelector("a")!;
    expect(anchor.href).toBe("http://example.test/path/map00010");
    expect(anchor.textContent).toBe("http://example.test/path/map00010");
  });

  it("leaves non-URL values in link columns as plain text", () => {
    renderResults(
      container,
      sampleResult({ rows: [["x", "not a url"]] }),
    );
    expect(container.querySelector("tbody a")).toBeNull();
  });

  it("shows the row count and elapsed time", () => {
    renderResults(container, sampleResult());
    expect(container.querySelector(".row-count")!.textContent).toBe("2 rows");
    expect(container.querySelector(".elapsed")!.textContent).toBe("42.0 ms");
  });

  it("shows the cache badge only on cache hits", () => {
    renderResults(container, sampleResult());
    expect(container.querySelector(".cache-badge")).toBeNull();
    renderResults(container, sampleResult({ cache_hit: true }));
    expect(container.querySelector(".cache-badge")!.textContent).toBe("cached");
  });

  it("renders header plus empty-state message for empty results", () => {
    renderResults(container, sampleResult({ rows: [] }));
    expect(container.querySelectorAll("th")).toHaveLength(2);
    expect(container.querySelectorAll("tbody tr")).toHaveLength(0);
    expect(container.querySelector(".empty-state")!.textContent).toContain(
      "No rows",
    );
    expect(container.querySelector(".row-count")!.textContent).toBe("0 rows");
  });

  it("lists warnings above the table", () => {
    renderResults(container, sampleResult({ warnings: ["w1", "w2"] }));
    const warnings = [...container.querySelectorAll(".warning")].map(
      (el) => el.textContent,
    );
    expect(warnings).toEqual(["w1", "w2"]);
  });

  it("renders any generated table without error (fuzz)", () => {
    const rand = mulberry32(20260823);
    for (let i = 0; i < 250; i++) {
      const result = randomResult(rand);
      renderResults(container, result);
      expect(container.querySelectorAll("th")).toHaveLength(
        result.columns.length,
      );
      expect(container.querySelectorAll("tbody tr")).toHaveLength(
        result.rows.length,
      );
      // Hostile values must land as text nodes, never as parsed markup.
      expect(container.querySelector("script")).toBeNull();
    }
  });
});

describe("renderError", () => {
  it("shows the failure stage and message", () => {
    renderError(container, "template", "unknown template nope");
    expect(container.querySelector(".error-state")!.textContent).toBe(
      "[template] unknown template nope",
    );
  });
});
