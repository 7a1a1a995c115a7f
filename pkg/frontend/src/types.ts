// Wire types mirroring the service JSON API.

export interface CheckBoxItem {
  id: number;
  description: string;
  isChecked: boolean;
  class: string;
}

export interface HierarchyChild {
  path: string;
  name: string;
  id: number;
  internal: boolean;
}

export interface HierarchyVertex {
  path: string;
  name: string;
  stepLabel: string;
  levelLabels: string[];
  domainMask: number;
  children: HierarchyChild[];
}

export interface HierarchySummary {
  maxDepth: number;
  vertexCount: number;
  reasons: { id: number; name: string }[];
  reasonsMask: number;
  vertices: HierarchyVertex[];
}

export interface PutResponse {
  path: string;
  bitmap: number;
  nextSteps: string[];
}

export interface ReportResponse {
  depth: number;
  rows: (string | null)[][];
}

export interface RecordResponse {
  personId: number;
  bitmaps: Record<string, number>;
  reasons: number;
}

/** Reserved pseudo-step addressing the reasons domain. */
export const REASONS_PATH = "~reasons";
