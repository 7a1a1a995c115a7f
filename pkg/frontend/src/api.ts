import type {
  CheckBoxItem,
  HierarchySummary,
  PutResponse,
  RecordResponse,
  ReportResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchFn = typeof fetch;

/** Thin typed client over the selection service. */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchFn = globalThis.fetch.bind(globalThis),
  ) {}

  private async request<T>(method: string, url: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + url, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const detail =
        payload && typeof payload.detail === "string"
          ? payload.detail
          : JSON.stringify(payload);
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  createPerson(name: string): Promise<{ id: number; name: string }> {
    return this.request("POST", "/api/persons", { name });
  }

  getHierarchy(): Promise<HierarchySummary> {
    return this.request("GET", "/api/hierarchy");
  }

  getCheckboxes(person: number, path: string): Promise<CheckBoxItem[]> {
    return this.request(
      "GET",
      `/api/persons/${person}/checkboxes?path=${encodeURIComponent(path)}`,
    );
  }

  putCheckboxes(person: number, path: string, items: CheckBoxItem[]): Promise<PutResponse> {
    return this.request(
      "PUT",
      `/api/persons/${person}/checkboxes?path=${encodeURIComponent(path)}`,
      items,
    );
  }

  getReport(person: number): Promise<ReportResponse> {
    return this.request("GET", `/api/persons/${person}/report`);
  }

  getRecord(person: number): Promise<RecordResponse> {
    return this.request("GET", `/api/persons/${person}/record`);
  }
}
