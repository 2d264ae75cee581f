/** HTTP client for the analysis service. */

import type {
  CycleSel,
  CycleWindow,
  EnsemblePayload,
  EnsembleRequest,
  Hierarchy,
  Side,
  SpatioPayload,
  TrialRef,
} from "./types.js";

export interface ApiClient {
  hierarchy(): Promise<Hierarchy>;
  ensemble(req: EnsembleRequest): Promise<EnsemblePayload>;
  spatiotemporal(trialsA: TrialRef[], trialsB: TrialRef[]): Promise<SpatioPayload>;
  cycleWindow(ref: TrialRef, side: Side, cycle: CycleSel): Promise<CycleWindow>;
  videoUrl(ref: TrialRef): string;
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`${url}: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

async function postJson<T>(url: string, body: unknown): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    throw new Error(`${url}: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as T;
}

export class HttpApi implements ApiClient {
  constructor(private base: string = "") {}

  async hierarchy(): Promise<Hierarchy> {
    const tree: Hierarchy = {};
    const groups = await getJson<string[]>(`${this.base}/api/groups`);
    for (const group of groups) {
      tree[group] = {};
      const patients = await getJson<string[]>(
        `${this.base}/api/groups/${group}/patients`,
      );
      for (const patient of patients) {
        tree[group][patient] = await getJson<string[]>(
          `${this.base}/api/groups/${group}/patients/${patient}/trials`,
        );
      }
    }
    return tree;
  }

  ensemble(req: EnsembleRequest): Promise<EnsemblePayload> {
    return postJson(`${this.base}/api/ensemble`, req);
  }

  spatiotemporal(trialsA: TrialRef[], trialsB: TrialRef[]): Promise<SpatioPayload> {
    return postJson(`${this.base}/api/spatiotemporal`, {
      trials_a: trialsA,
      trials_b: trialsB,
    });
  }

  cycleWindow(ref: TrialRef, side: Side, cycle: CycleSel): Promise<CycleWindow> {
    const index = cycle === "first" || cycle === "all" ? 0 : cycle;
    return getJson(
      `${this.base}/api/window/${ref.group}/${ref.patient_id}/${ref.trial_id}` +
        `?side=${side}&cycle=${index}`,
    );
  }

  videoUrl(ref: TrialRef): string {
    return `${this.base}/api/video/${ref.group}/${ref.patient_id}/${ref.trial_id}`;
  }
}
