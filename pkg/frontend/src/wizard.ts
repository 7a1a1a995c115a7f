import type { ApiClient } from "./api";
import type { CheckBoxItem, HierarchySummary, HierarchyVertex } from "./types";
import { REASONS_PATH } from "./types";

function depthOf(path: string): number {
  if (path === "") return 0;
  return path.split("/").length;
}

function isBelow(candidate: string, ancestor: string): boolean {
  if (ancestor === "") return candidate !== "";
  return candidate.startsWith(ancestor + "/");
}

/** Stable breadth-first order: all steps of depth d before depth d+1. */
function sortBreadthFirst(queue: string[]): string[] {
  return queue
    .map((path, index) => ({ path, index }))
    .sort((a, b) => depthOf(a.path) - depthOf(b.path) || a.index - b.index)
    .map((entry) => entry.path);
}

export type WizardPhase = "steps" | "reasons" | "report";

/**
 * Drives the cascading wizard: one step at a time from a breadth-first
 * queue, then the reasons step, then the report. All mutation goes through
 * the service API; the controller only mirrors enough state to guard
 * against submitting a step whose parent is no longer checked.
 */
export class WizardController {
  personId: number | null = null;
  hierarchy: HierarchySummary | null = null;
  queue: string[] = [];
  completed: string[] = [];
  checked = new Set<string>();
  reasonsDone = false;

  constructor(private api: ApiClient) {}

  async load(): Promise<void> {
    this.hierarchy = await this.api.getHierarchy();
  }

  async start(name: string): Promise<void> {
    if (!this.hierarchy) await this.load();
    const person = await this.api.createPerson(name);
    this.personId = person.id;
    this.queue = [""];
    this.completed = [];
    this.checked.clear();
    this.reasonsDone = false;
  }

  vertex(path: string): HierarchyVertex | undefined {
    return this.hierarchy?.vertices.find((v) => v.path === path);
  }

  stepLabel(path: string): string {
    if (path === REASONS_PATH) return "Reasons";
    return this.vertex(path)?.stepLabel ?? path;
  }

  phase(): WizardPhase {
    if (this.queue.length > 0) return "steps";
    if (!this.reasonsDone) return "reasons";
    return "report";
  }

  currentStep(): string | null {
    if (this.queue.length > 0) return this.queue[0];
    if (!this.reasonsDone) return REASONS_PATH;
    return null;
  }

  /** Parent-checked guard mirroring the server's conflict response. */
  stepIsReachable(path: string): boolean {
    if (path === "" || path === REASONS_PATH) return true;
    return this.checked.has(path);
  }

  async loadStep(path: string): Promise<CheckBoxItem[]> {
    if (this.personId === null) throw new Error("wizard not started");
    return this.api.getCheckboxes(this.personId, path);
  }

  async submitStep(path: string, items: CheckBoxItem[]): Promise<string[]> {
    if (this.personId === null) throw new Error("wizard not started");
    if (!this.stepIsReachable(path)) {
      // redirect target: nearest ancestor step (never submit an orphan)
      throw new OrphanStepRedirect(parentOf(path));
    }
    const response = await this.api.putCheckboxes(this.personId, path, items);
    if (path === REASONS_PATH) {
      this.reasonsDone = true;
      return [];
    }

    const vertex = this.vertex(path);
    const checkedIds = new Set(items.filter((i) => i.isChecked).map((i) => i.id));
    for (const child of vertex?.children ?? []) {
      if (checkedIds.has(child.id)) {
        this.checked.add(child.path);
      } else {
        // unchecking prunes the whole descendant subtree (mirrors the
        // server-side cascade), including its pending and completed steps
        this.checked.delete(child.path);
        for (const known of [...this.checked]) {
          if (isBelow(known, child.path)) this.checked.delete(known);
        }
        const gone = (p: string) => p === child.path || isBelow(p, child.path);
        this.queue = this.queue.filter((q) => !gone(q));
        this.completed = this.completed.filter((d) => !gone(d));
      }
    }

    this.queue = this.queue.filter((queued) => queued !== path);
    if (!this.completed.includes(path)) this.completed.push(path);
    const fresh = response.nextSteps.filter(
      (step) => !this.queue.includes(step) && !this.completed.includes(step),
    );
    this.queue = sortBreadthFirst([...this.queue, ...fresh]);
    return response.nextSteps;
  }

  /** Revisit a completed step (re-enters the queue at its depth slot). */
  revisit(path: string): void {
    if (path === REASONS_PATH) {
      this.reasonsDone = false;
      return;
    }
    if (!this.stepIsReachable(path)) return;
    if (!this.queue.includes(path)) {
      this.queue = sortBreadthFirst([path, ...this.queue]);
    }
  }

  async reportRows(): Promise<(string | null)[][]> {
    if (this.personId === null) throw new Error("wizard not started");
    const report = await this.api.getReport(this.personId);
    return report.rows;
  }
}

export class OrphanStepRedirect extends Error {
  constructor(public redirectTo: string) {
    super(`step is unreachable; redirecting to ${redirectTo || "the first step"}`);
  }
}

export function parentOf(path: string): string {
  const slash = path.lastIndexOf("/");
  return slash < 0 ? "" : path.slice(0, slash);
}
