/**
 * Client for the tagalign HTTP service.
 *
 * The service structures token-by-token NER generations into entities and
 * scores span predictions; this wrapper exposes those two pipelines with
 * plain typed objects.  Result records mirror the command-line JSONL
 * output field for field, so `JSON.stringify(record)` reproduces one CLI
 * output line byte for byte.
 */

export interface ProcessRecord {
  id: string;
  tokens: string[];
  label_set: string[];
  generation?: string;
  gold_tags?: string[];
}

export interface EntitySpan {
  start: number;
  end: number;
  type: string;
  text: string;
}

export interface ProcessStats {
  tier: "exact" | "subsequence" | "lcs" | null;
  lcs_length: number;
  unmatched_pred: number;
  unmatched_orig: number;
  unknown_labels: number;
  malformed: number;
}

export interface ProcessResult {
  id: string;
  tags: string[];
  entities: EntitySpan[];
  stats: ProcessStats;
  /** present only when the record soft-failed */
  error?: string;
}

export interface NormalizerSpec {
  kind: "identity" | "unicode" | "vocab" | "unicode+vocab";
  alphabet?: string | null;
}

export interface ProcessOptions {
  scheme?: "bio" | "bioes";
  normalizer?: NormalizerSpec;
  repair?: "conservative" | "strict";
  jobs?: number;
  gap_marker?: string | null;
}

/** One sentence on one side of an evaluation: spans, or tags to decode. */
export interface EvalSide {
  id: string;
  entities?: EntitySpan[];
  tags?: string[];
  tokens?: string[];
}

export interface TypeScore {
  tp: number;
  fp: number;
  fn: number;
  precision: number;
  recall: number;
  f1: number;
}

export interface EvalReport {
  tp: number;
  fp: number;
  fn: number;
  precision: number;
  recall: number;
  f1: number;
  ue: number;
  ne: number;
  be: number;
  ue_rate: number;
  ne_rate: number;
  be_rate: number;
  per_type?: Record<string, TypeScore>;
}

export interface EvaluateOptions {
  perType?: boolean;
  scheme?: "bio" | "bioes";
}

export class TagalignClient {
  private readonly baseUrl: string;

  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async post(path: string, payload: unknown): Promise<string> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        // non-JSON error body, keep raw text
      }
      throw new Error(`service error (${response.status}): ${detail}`);
    }
    return text;
  }

  async health(): Promise<{ status: string; version: string }> {
    const response = await fetch(this.baseUrl + "/v1/health");
    if (!response.ok) {
      throw new Error(`service error (${response.status})`);
    }
    return (await response.json()) as { status: string; version: string };
  }

  /** Structure a batch of generation records into tagged entities. */
  async process(
    records: ProcessRecord[],
    options: ProcessOptions = {},
  ): Promise<ProcessResult[]> {
    const body = await this.post("/v1/process", { records, options });
    return (JSON.parse(body) as { records: ProcessResult[] }).records;
  }

  /** Structure a single generation; mirrors one CLI output record. */
  async processOne(
    tokens: string[],
    labelSet: string[],
    generation: string,
    options: ProcessOptions = {},
  ): Promise<ProcessResult> {
    const records = await this.process(
      [{ id: "0", tokens, label_set: labelSet, generation }],
      options,
    );
    return records[0];
  }

  /**
   * Score predictions against gold; returns the parsed report plus the raw
   * response body, which is exactly what the CLI prints.
   */
  async evaluateRaw(
    gold: EvalSide[],
    pred: EvalSide[],
    options: EvaluateOptions = {},
  ): Promise<{ report: EvalReport; raw: string }> {
    const raw = await this.post("/v1/evaluate", {
      gold,
      pred,
      per_type: options.perType ?? false,
      scheme: options.scheme ?? "bio",
    });
    return { report: JSON.parse(raw) as EvalReport, raw };
  }

  /** Score predictions against gold. */
  async evaluate(
    gold: EvalSide[],
    pred: EvalSide[],
    options: EvaluateOptions = {},
  ): Promise<EvalReport> {
    return (await this.evaluateRaw(gold, pred, options)).report;
  }
}

export default TagalignClient;
