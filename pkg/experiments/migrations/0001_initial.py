from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('learner', models.CharField(choices=[('amlc', 'AMLC'), ('independent', 'Independent'), ('random', 'Random'), ('peer', 'PEER'), ('peer_share', 'PEER+Share')], max_length=16)),
                ('dataset_name', models.CharField(db_index=True, max_length=255)),
                ('seed', models.PositiveIntegerField()),
                ('oracle_budget', models.PositiveIntegerField(blank=True, help_text='Empty for unlimited runs', null=True)),
                ('b', models.FloatField()),
                ('C', models.FloatField()),
                ('b2', models.FloatField(blank=True, null=True)),
                ('accuracy_micro', models.FloatField(blank=True, null=True)),
                ('accuracy_macro', models.FloatField(blank=True, null=True)),
                ('oracle_queries', models.PositiveIntegerField(default=0)),
                ('peer_queries', models.PositiveIntegerField(default=0)),
                ('budget_exhausted', models.BooleanField(default=False)),
                ('report', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['dataset_name', 'learner', 'oracle_budget'], name='exprun_dataset_learner_idx')],
            },
        ),
    ]
