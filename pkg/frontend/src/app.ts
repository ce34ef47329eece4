/**
 * Page controller: owns the upload -> edit -> run -> compare loop.
 * Enforces at most one in-flight submission per dataset (matching the
 * service's one-running-job-per-dataset policy) and appends every
 * finished run to the history.
 */

import { ServiceClient, pollJob, type PollOptions } from './api';
import { RunHistory, TargetEditorState, type RunEntry } from './state';
import type { DatasetInfo, SelectionParamsBody } from './types';

export class AppController {
  readonly history = new RunHistory();
  private readonly inFlight = new Set<string>();
  private readonly editors = new Map<string, TargetEditorState>();

  constructor(
    private readonly client: ServiceClient,
    private readonly pollOptions: PollOptions = {},
  ) {}

  /** Upload a pool and seed its target editor from the column summary. */
  async uploadPool(csv: string): Promise<DatasetInfo> {
    const info = await this.client.uploadDataset(csv);
    if (!this.editors.has(info.dataset_id)) {
      this.editors.set(info.dataset_id, TargetEditorState.fromDataset(info));
    }
    return info;
  }

  editor(datasetId: string): TargetEditorState {
    const editor = this.editors.get(datasetId);
    if (!editor) {
      throw new Error(`no dataset uploaded with id '${datasetId}'`);
    }
    return editor;
  }

  /** Swap in a hand-built editor (manual schema editing). */
  setEditor(datasetId: string, editor: TargetEditorState): void {
    this.editors.set(datasetId, editor);
  }

  canSubmit(datasetId: string): boolean {
    return (
      !this.inFlight.has(datasetId) && this.editor(datasetId).isValid()
    );
  }

  /**
   * Launch a run and wait for it; the finished job is appended to the
   * history. Rejects immediately if this dataset already has a run in
   * flight or the editor state is invalid.
   */
  async runSelection(
    datasetId: string,
    params: SelectionParamsBody,
  ): Promise<RunEntry> {
    if (this.inFlight.has(datasetId)) {
      throw new Error(
        `dataset ${datasetId} already has a selection run in flight`,
      );
    }
    const editor = this.editor(datasetId);
    const messages = editor.validate();
    if (messages.length > 0) {
      throw new Error(
        `invalid targets: ${messages
          .map((m) => `${m.attribute}: ${m.message}`)
          .join('; ')}`,
      );
    }
    const schema = editor.toSchema();
    this.inFlight.add(datasetId);
    try {
      const jobId = await this.client.submitSelection(
        datasetId,
        schema,
        params,
      );
      editor.markRun();
      const job = await pollJob(this.client, jobId, this.pollOptions);
      return this.history.add(job, schema, params);
    } finally {
      this.inFlight.delete(datasetId);
    }
  }
}
