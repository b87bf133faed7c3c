/** Template picker: natural-language text with inline slot controls. */

import type { Template } from "./api.js";

export interface Submission {
  templateId: string;
  slotValues: Record<string, string>;
}

export type SubmitHandler = (submission: Submission) => void;

/** Split display text on `{slot}` markers, keeping the marker names. */
function splitDisplayText(text: string): Array<string | { slot: string }> {
  const parts: Array<string | { slot: string }> = [];
  let last = 0;
  for (const match of text.matchAll(/\{([A-Za-z0-9_]+)\}/g)) {
    const index = match.index ?? 0;
    if (index > last) parts.push(text.slice(last, index));
    parts.push({ slot: match[1]! });
    last = index + match[0].length;
  }
  if (last < text.length) parts.push(text.slice(last));
  return parts;
}

function slotControl(
  template: Template,
  slotName: string,
  onChange: () => void,
): HTMLElement {
  const slot = template.slots.find((s) => s.name === slotName);
  if (!slot) {
    const missing = document.createElement("span");
    missing.className = "slot-missing";
    missing.textContent = `{${slotName}}`;
    return missing;
  }
  if (slot.kind === "enum") {
    const select = document.createElement("select");
    select.className = "slot";
    select.dataset.slot = slot.name;
    const placeholder = document.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "…";
    select.appendChild(placeholder);
    for (const value of slot.values) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = value;
      select.appendChild(option);
    }
    select.addEventListener("change", onChange);
    return select;
  }
  const input = document.createElement("input");
  input.className = "slot";
  input.dataset.slot = slot.name;
  if (slot.kind === "integer") {
    input.type = "number";
    if (slot.min !== null) input.min = String(slot.min);
    if (slot.max !== null) input.max = String(slot.max);
  }
  input.addEventListener("input", onChange);
  return input;
}

function readSlotValues(form: HTMLElement): Record<string, string> {
  const values: Record<string, string> = {};
  for (const el of form.querySelectorAll<HTMLElement>("[data-slot]")) {
    const control = el as HTMLSelectElement | HTMLInputElement;
    values[el.dataset.slot!] = control.value;
  }
  return values;
}

function renderTemplateForm(
  template: Template,
  onSubmit: SubmitHandler,
): HTMLElement {
  const form = document.createElement("form");
  form.className = "template";
  form.dataset.templateId = template.id;

  const sentence = document.createElement("p");
  sentence.className = "template-text";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Run";
  submit.disabled = true;

  const refresh = () => {
    const values = readSlotValues(form);
    submit.disabled = template.slots.some((s) => !values[s.name]);
  };

  for (const part of splitDisplayText(template.text)) {
    if (typeof part === "string") {
      sentence.appendChild(document.createTextNode(part));
    } else {
      sentence.appendChild(slotControl(template, part.slot, refresh));
    }
  }
  form.appendChild(sentence);
  form.appendChild(submit);
  refresh();

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const values = readSlotValues(form);
    if (template.slots.some((s) => !values[s.name])) return;
    onSubmit({ templateId: template.id, slotValues: values });
  });
  return form;
}

export function renderPicker(
  container: HTMLElement,
  templates: Template[],
  onSubmit: SubmitHandler,
): void {
  container.replaceChildren();
  const list = document.createElement("div");
  list.className = "template-list";
  for (const template of templates) {
    list.appendChild(renderTemplateForm(template, onSubmit));
  }
  container.appendChild(list);
}
