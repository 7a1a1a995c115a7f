import type { CheckBoxItem } from "./types";
import { REASONS_PATH } from "./types";
import { OrphanStepRedirect, WizardController } from "./wizard";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

/**
 * Mounts the wizard: a start form, then one checkbox step at a time with a
 * sidebar of completed steps for revisiting, then the report table.
 */
export class WizardApp {
  constructor(
    private root: HTMLElement,
    private controller: WizardController,
  ) {}

  async mount(): Promise<void> {
    await this.controller.load();
    this.renderStart();
  }

  private clear(): void {
    this.root.replaceChildren();
  }

  private renderStart(): void {
    this.clear();
    const form = el("form", { id: "start-form" });
    const input = el("input", { id: "person-name", placeholder: "Your name" });
    const button = el("button", { type: "submit" }, "Start");
    form.append(input, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const name = (input as HTMLInputElement).value.trim();
      if (!name) return;
      void this.controller.start(name).then(() => this.renderCurrent());
    });
    this.root.append(el("h1", {}, "Where have you been?"), form);
  }

  async renderCurrent(): Promise<void> {
    const step = this.controller.currentStep();
    if (step === null) {
      await this.renderReport();
    } else {
      await this.renderStep(step);
    }
  }

  async renderStep(path: string): Promise<void> {
    let items: CheckBoxItem[];
    try {
      if (!this.controller.stepIsReachable(path)) {
        throw new OrphanStepRedirect(
          path === "" ? "" : path.split("/").slice(0, -1).join("/"),
        );
      }
      items = await this.controller.loadStep(path);
    } catch (error) {
      if (error instanceof OrphanStepRedirect) {
        await this.renderStep(error.redirectTo);
        return;
      }
      throw error;
    }

    this.clear();
    const heading = this.controller.stepLabel(path);
    const where = path === "" || path === REASONS_PATH ? "" : ` in ${path.replaceAll("/", " / ")}`;
    this.root.append(el("h1", {}, `Select: ${heading}${where}`));

    const form = el("form", { id: "step-form", "data-path": path });
    for (const item of items) {
      const label = el("label", { class: item.class || "checkbox-item" });
      const box = el("input", {
        type: "checkbox",
        "data-id": String(item.id),
        "data-description": item.description,
      }) as HTMLInputElement;
      box.checked = item.isChecked;
      label.append(box, el("span", {}, item.description));
      form.append(label);
    }
    const button = el("button", { type: "submit", id: "submit-step" }, "Continue");
    form.append(button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const updated: CheckBoxItem[] = items.map((item) => {
        const box = form.querySelector<HTMLInputElement>(
          `input[data-id="${item.id}"]`,
        );
        return { ...item, isChecked: box ? box.checked : item.isChecked };
      });
      void this.controller
        .submitStep(path, updated)
        .then(() => this.renderCurrent())
        .catch((error) => {
          if (error instanceof OrphanStepRedirect) return this.renderStep(error.redirectTo);
          this.showError(form, error);
          return undefined;
        });
    });
    this.root.append(form, this.renderSidebar());
  }

  private renderSidebar(): HTMLElement {
    const aside = el("aside", { id: "completed-steps" });
    aside.append(el("h2", {}, "Completed steps"));
    const list = el("ul", {});
    for (const done of this.controller.completed) {
      const item = el("li", {});
      const link = el("a", { href: "#", "data-step": done }, done === "" ? "Start" : done);
      link.addEventListener("click", (event) => {
        event.preventDefault();
        this.controller.revisit(done);
        void this.renderCurrent();
      });
      item.append(link);
      list.append(item);
    }
    aside.append(list);
    return aside;
  }

  private showError(form: HTMLElement, error: unknown): void {
    const note = el("p", { class: "error" }, String(error));
    form.append(note);
  }

  async renderReport(): Promise<void> {
    const rows = await this.controller.reportRows();
    const depth = this.controller.hierarchy?.maxDepth ?? 0;
    this.clear();
    this.root.append(el("h1", {}, "Visited places"));
    const table = el("table", { id: "report" });
    const head = el("tr", {});
    for (let level = 1; level <= depth; level++) {
      head.append(el("th", {}, `Level ${level}`));
    }
    table.append(head);
    for (const row of rows) {
      const tr = el("tr", {});
      for (const cell of row) {
        tr.append(el("td", {}, cell ?? ""));
      }
      table.append(tr);
    }
    this.root.append(table);
    const back = el("a", { href: "#", id: "back-to-reasons" }, "Edit reasons");
    back.addEventListener("click", (event) => {
      event.preventDefault();
      this.controller.revisit(REASONS_PATH);
      void this.renderCurrent();
    });
    this.root.append(back);
  }
}
