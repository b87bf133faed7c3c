import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderPicker, type Submission } from "../src/picker.js";
import { SAMPLE_TEMPLATES } from "./helpers.js";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="picker"></div>';
  container = document.getElementById("picker")!;
});

describe("renderPicker", () => {
  it("renders one form per template with the display text inline", () => {
    renderPicker(container, SAMPLE_TEMPLATES, () => {});
    const forms = container.querySelectorAll("form.template");
    expect(forms).toHaveLength(2);
    expect(forms[0]!.textContent).toContain("Find microbes sampled at");
    expect(forms[0]!.getAttribute("data-template-id")).toBe("one-slot");
  });

  it("renders an enum dropdown restricted to the allowed values", () => {
    renderPicker(container, SAMPLE_TEMPLATES, () => {});
    const select = container.querySelector<HTMLSelectElement>(
      'form[data-template-id="one-slot"] select[data-slot="day"]',
    )!;
    const options = [...select.options].map((o) => o.value);
    expect(options).toEqual(["", "80", "100"]);
  });

  it("disables submit until every slot is filled", () => {
    renderPicker(container, SAMPLE_TEMPLATES, () => {});
    const form = container.querySelector<HTMLFormElement>(
      'form[data-template-id="two-slot"]',
    )!;
    const button = form.querySelector("button")!;
    const [a, b] = form.querySelectorAll<HTMLSelectElement>("select");
    expect(button.disabled).toBe(true);

    a!.value = "180";
    a!.dispatchEvent(new Event("change"));
    expect(button.disabled).toBe(true);

    b!.value = "131";
    b!.dispatchEvent(new Event("change"));
    expect(button.disabled).toBe(false);
  });

  it("submits the chosen slot values", () => {
    const onSubmit = vi.fn<[Submission], void>();
    renderPicker(container, SAMPLE_TEMPLATES, onSubmit);
    const form = container.querySelector<HTMLFormElement>(
      'form[data-template-id="one-slot"]',
    )!;
    const select = form.querySelector<HTMLSelectElement>("select")!;
    select.value = "100";
    select.dispatchEvent(new Event("change"));
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    expect(onSubmit).toHaveBeenCalledWith({
      templateId: "one-slot",
      slotValues: { day: "100" },
    });
  });

  it("does not submit while a slot is empty", () => {
    const onSubmit = vi.fn();
    renderPicker(container, SAMPLE_TEMPLATES, onSubmit);
    const form = container.querySelector<HTMLFormElement>(
      'form[data-template-id="two-slot"]',
    )!;
    form.dispatchEvent(new Event("submit", { cancelable: true }));
    expect(onSubmit).not.toHaveBeenCalled();
  });

  it("re-render replaces previous content", () => {
    renderPicker(container, SAMPLE_TEMPLATES, () => {});
    renderPicker(container, SAMPLE_TEMPLATES.slice(0, 1), () => {});
    expect(container.querySelectorAll("form")).toHaveLength(1);
  });
});
