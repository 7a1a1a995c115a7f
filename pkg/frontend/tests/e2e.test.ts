// End-to-end: a scripted browser session drives the DOM wizard against the
// real service and must store exactly the same record as a plain scripted
// HTTP sequence, finishing with the three-row report.
import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import type { CheckBoxItem } from "../src/types";
import { WizardApp } from "../src/ui";
import { WizardController } from "../src/wizard";

const PORT = 8917;
const BASE = `http://127.0.0.1:${PORT}`;
const fetchFn: typeof fetch = (...args) => fetch(...args);

let server: ChildProcess;

async function waitForServer(definitelyUp: number, timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetchFn(`${BASE}/api/hierarchy`);
      if (response.ok) return;
    } catch {
      // still starting
    }
    await new Promise((r) => setTimeout(r, definitelyUp));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-m",
      "bitfold.cli",
      "serve",
      "--hierarchy",
      "places.json",
      "--dsn",
      ":memory:",
      "--listen",
      `127.0.0.1:${PORT}`,
      "--backend",
      "pbfd",
    ],
    { cwd: "..", stdio: "ignore" },
  );
  await waitForServer(150);
});

afterAll(() => {
  server?.kill();
});

// The walkthrough: continents, then per-branch steps, then reasons.
const SCENARIO: Array<[string, string[]]> = [
  ["", ["Antarctica", "Asia", "North America"]],
  ["Antarctica", ["McMurdo"]],
  ["Asia", ["China"]],
  ["Asia/China", ["Hunan"]],
  ["Asia/China/Hunan", ["Changsha"]],
  ["Asia/China/Hunan/Changsha", ["Liuyang"]],
  ["North America", ["United States"]],
  ["North America/United States", ["Maryland"]],
  ["North America/United States/Maryland", ["Howard"]],
  ["North America/United States/Maryland/Howard", ["Ellicott City"]],
  ["~reasons", ["Business", "Leisure"]],
];

const EXPECTED_BITMAPS: Record<string, number> = {
  "": 38,
  Antarctica: 1,
  Asia: 1,
  "Asia/China": 1,
  "Asia/China/Hunan": 1,
  "Asia/China/Hunan/Changsha": 1,
  "North America": 1,
  "North America/United States": 1,
  "North America/United States/Maryland": 1,
  "North America/United States/Maryland/Howard": 1,
};

async function waitFor<T>(probe: () => T | null, timeoutMs = 5000): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const value = probe();
    if (value !== null) return value;
    await new Promise((r) => setTimeout(r, 10));
  }
  throw new Error("timed out waiting for the page to settle");
}

/** Reference flow: the same scenario as raw HTTP calls, no UI involved. */
async function scriptedHttpReference(api: ApiClient) {
  const person = (await api.createPerson("scripted")).id;
  for (const [path, names] of SCENARIO) {
    const items = await api.getCheckboxes(person, path);
    const updated: CheckBoxItem[] = items.map((item) => ({
      ...item,
      isChecked: names.includes(item.description),
    }));
    await api.putCheckboxes(person, path, updated);
  }
  return {
    record: await api.getRecord(person),
    report: await api.getReport(person),
  };
}

describe("wizard end-to-end", () => {
  it("the browser session stores the same record as the scripted flow", async () => {
    const api = new ApiClient(BASE, fetchFn);
    const reference = await scriptedHttpReference(api);
    expect(reference.record.bitmaps).toEqual(EXPECTED_BITMAPS);
    expect(reference.report.rows).toHaveLength(3);

    document.body.innerHTML = '<div id="app"></div>';
    const root = document.querySelector<HTMLElement>("#app")!;
    const controller = new WizardController(new ApiClient(BASE, fetchFn));
    const app = new WizardApp(root, controller);
    await app.mount();

    // start the wizard
    const nameInput = await waitFor(() =>
      root.querySelector<HTMLInputElement>("#person-name"),
    );
    nameInput.value = "browser";
    root
      .querySelector("#start-form")!
      .dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));

    // follow the wizard wherever it goes; the queue is breadth-first, so all
    // of one depth's steps come before the next depth
    const namesByPath = new Map(SCENARIO);
    const visitedOrder: string[] = [];
    let lastForm: HTMLFormElement | null = null;
    while (visitedOrder.length < SCENARIO.length) {
      const form = await waitFor(() => {
        const candidate = root.querySelector<HTMLFormElement>("#step-form");
        return candidate && candidate !== lastForm ? candidate : null;
      });
      lastForm = form;
      const path = form.getAttribute("data-path") ?? "";
      visitedOrder.push(path);
      const names = namesByPath.get(path) ?? [];
      for (const box of form.querySelectorAll<HTMLInputElement>("input[type=checkbox]")) {
        box.checked = names.includes(box.getAttribute("data-description") ?? "");
      }
      form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
    }
    expect(visitedOrder).toEqual([
      "",
      "Antarctica",
      "Asia",
      "North America",
      "Asia/China",
      "North America/United States",
      "Asia/China/Hunan",
      "North America/United States/Maryland",
      "Asia/China/Hunan/Changsha",
      "North America/United States/Maryland/Howard",
      "~reasons",
    ]);

    // report page: three body rows under the header
    const table = await waitFor(() => root.querySelector<HTMLTableElement>("#report"));
    const bodyRows = Array.from(table.querySelectorAll("tr")).slice(1);
    expect(bodyRows).toHaveLength(3);
    const cellText = bodyRows.map((tr) =>
      Array.from(tr.querySelectorAll("td")).map((td) => td.textContent),
    );
    expect(cellText).toEqual([
      ["Antarctica", "McMurdo", "", "", ""],
      ["Asia", "China", "Hunan", "Changsha", "Liuyang"],
      ["North America", "United States", "Maryland", "Howard", "Ellicott City"],
    ]);

    // the stored record equals the scripted-HTTP reference, bit for bit
    const wizardRecord = await api.getRecord(controller.personId!);
    expect(wizardRecord.bitmaps).toEqual(reference.record.bitmaps);
    expect(wizardRecord.reasons).toEqual(reference.record.reasons);
    expect(wizardRecord.reasons).toBe(3);

    const wizardReport = await api.getReport(controller.personId!);
    expect(wizardReport.rows).toEqual(reference.report.rows);
  });

  it("unchecking everything empties the report", async () => {
    const api = new ApiClient(BASE, fetchFn);
    document.body.innerHTML = '<div id="app"></div>';
    const root = document.querySelector<HTMLElement>("#app")!;
    const controller = new WizardController(new ApiClient(BASE, fetchFn));
    const app = new WizardApp(root, controller);
    await app.mount();

    const nameInput = await waitFor(() =>
      root.querySelector<HTMLInputElement>("#person-name"),
    );
    nameInput.value = "empty";
    root
      .querySelector("#start-form")!
      .dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));

    for (const path of ["", "~reasons"]) {
      const form = await waitFor(() => {
        const candidate = root.querySelector<HTMLFormElement>("#step-form");
        return candidate && candidate.getAttribute("data-path") === path ? candidate : null;
      });
      form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
    }
    const table = await waitFor(() => root.querySelector<HTMLTableElement>("#report"));
    expect(Array.from(table.querySelectorAll("tr")).slice(1)).toHaveLength(0);
  });
});
