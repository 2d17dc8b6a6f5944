// What-if scenario builder state: a treatment with control/treated values
// plus per-parameter condition toggles bound to the schema sampling bounds.

import type { ColumnDescriptor, ScenarioRequest } from './types';

export interface SliderSpec {
  name: string;
  unit: string;
  min: number;
  max: number;
  value: number;
  enabled: boolean;
}

export interface FormIssue {
  field: string;
  message: string;
}

export class ScenarioFormState {
  readonly sliders: SliderSpec[];
  treatment = '';
  controlValue = NaN;
  treatValue = NaN;
  outcome: string;
  nSamples = 2000;
  seed = 0;

  constructor(schema: ColumnDescriptor[], outcome = 'Heating_Load') {
    this.outcome = outcome;
    // Only columns with sampling bounds can be pinned or treated; that is
    // the sampled parameters plus the aggregate window ratio.
    this.sliders = schema
      .filter((c) => c.min !== null && c.max !== null && c.role !== 'outcome')
      .filter((c) => c.role === 'sampled' || c.name === 'WWR')
      .map((c) => ({
        name: c.name,
        unit: c.unit,
        min: c.min as number,
        max: c.max as number,
        value: ((c.min as number) + (c.max as number)) / 2,
        enabled: false,
      }));
  }

  treatmentChoices(): string[] {
    return this.sliders.map((s) => s.name);
  }

  slider(name: string): SliderSpec | undefined {
    return this.sliders.find((s) => s.name === name);
  }

  setTreatment(name: string): void {
    this.treatment = name;
    const spec = this.slider(name);
    if (spec) {
      spec.enabled = false; // a treatment cannot also be conditioned
      if (Number.isNaN(this.controlValue)) this.controlValue = spec.min;
      if (Number.isNaN(this.treatValue)) this.treatValue = spec.max;
    }
  }

  /** Clamp a slider (or treatment arm) value into its bounds. */
  clamp(name: string, value: number): number {
    const spec = this.slider(name);
    if (!spec) return value;
    return Math.min(spec.max, Math.max(spec.min, value));
  }

  setCondition(name: string, enabled: boolean, value?: number): void {
    const spec = this.slider(name);
    if (!spec) throw new Error(`unknown parameter ${name}`);
    if (name === this.treatment && enabled) {
      throw new Error('treatment cannot be conditioned');
    }
    spec.enabled = enabled;
    if (value !== undefined) spec.value = this.clamp(name, value);
  }

  validate(): FormIssue[] {
    const issues: FormIssue[] = [];
    if (!this.treatment) {
      issues.push({ field: 'treatment', message: 'choose a treatment parameter' });
      return issues;
    }
    if (Number.isNaN(this.controlValue) || Number.isNaN(this.treatValue)) {
      issues.push({ field: 'values', message: 'set control and treated values' });
    } else if (this.controlValue === this.treatValue) {
      issues.push({ field: 'values', message: 'control and treated values must differ' });
    }
    const spec = this.slider(this.treatment);
    if (spec) {
      for (const [label, v] of [
        ['control', this.controlValue],
        ['treated', this.treatValue],
      ] as const) {
        if (!Number.isNaN(v) && (v < spec.min || v > spec.max)) {
          issues.push({
            field: 'values',
            message: `${label} value ${v} outside [${spec.min}, ${spec.max}]`,
          });
        }
      }
    }
    if (!Number.isInteger(this.nSamples) || this.nSamples < 2) {
      issues.push({ field: 'n_samples', message: 'sample count must be at least 2' });
    }
    return issues;
  }

  conditions(): Record<string, number> {
    const out: Record<string, number> = {};
    for (const spec of this.sliders) {
      if (spec.enabled && spec.name !== this.treatment) out[spec.name] = spec.value;
    }
    return out;
  }

  /** The request body, or null when validation fails (no request is sent). */
  buildRequest(): ScenarioRequest | null {
    if (this.validate().length > 0) return null;
    return {
      treatment: this.treatment,
      control: this.controlValue,
      treat: this.treatValue,
      outcome: this.outcome,
      conditions: this.conditions(),
      n_samples: this.nSamples,
    };
  }
}
